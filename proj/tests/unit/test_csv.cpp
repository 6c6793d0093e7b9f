// Copyright 2026 The CCF Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>

#include "ccf/csv.hpp"
#include "ccf/errors.hpp"
#include "test_util.hpp"

using namespace ccf;

TEST_CASE("csv escaping follows rfc 4180") {
  CHECK(csv::escape_field("plain") == "plain");
  CHECK(csv::escape_field("") == "\"\"");
  CHECK(csv::escape_field("a,b") == "\"a,b\"");
  CHECK(csv::escape_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::escape_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv::escape_field("cr\rhere") == "\"cr\rhere\"");
}

TEST_CASE("csv output layout is pinned") {
  TableSchema schema;
  schema.table_name = "t";
  schema.columns = {{"id", ColumnType::Int64, true},
                    {"name", ColumnType::String, true},
                    {"ok", ColumnType::Bool, true},
                    {"score", ColumnType::Double, true}};
  RowGroup rg;
  for (const auto& c : schema.columns) rg.emplace_back(c.type);
  rg[0].append_int64(-7);
  rg[1].append_string("a,b");
  rg[2].append_bool(true);
  rg[3].append_double(2.5);
  rg[0].append_null();
  rg[1].append_null();
  rg[2].append_null();
  rg[3].append_null();

  const Table t{schema, {rg}};
  CHECK(csv::to_csv(t) ==
        "id,name,ok,score\r\n"
        "-7,\"a,b\",true,2.5\r\n"
        ",,,\r\n");
}

TEST_CASE("csv parser handles quoting edge cases") {
  const auto rows = csv::parse_rows("a,\"b,c\",\"d\"\"e\"\r\nnext,\"multi\nline\",\r\n");
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].size() == 3);
  CHECK(rows[0][0].text == "a");
  CHECK(rows[0][1].text == "b,c");
  CHECK(rows[0][2].text == "d\"e");
  CHECK(rows[1][1].text == "multi\nline");
  CHECK(rows[1][2].text == "");
  CHECK_FALSE(rows[1][2].quoted);

  CHECK_THROWS_AS((void)csv::parse_rows("\"unterminated"), DecodingError);
  CHECK_THROWS_AS((void)csv::parse_rows("\"x\"y"), DecodingError);
}

TEST_CASE("tables round-trip through csv") {
  std::mt19937_64 rng(31);
  const Table t = test::random_table(rng, 200, 1);
  const std::string text = csv::to_csv(t);
  const Table back = csv::from_csv(text, t.schema);
  CHECK(back == t);
}

TEST_CASE("csv doubles round-trip exactly") {
  TableSchema schema;
  schema.table_name = "d";
  schema.columns = {{"v", ColumnType::Double, false}};
  ColumnVector col(ColumnType::Double);
  col.append_double(0.1);
  col.append_double(1.0 / 3.0);
  col.append_double(1e-300);
  col.append_double(12345678901234567.0);
  const Table t{schema, {{col}}};
  CHECK(csv::from_csv(csv::to_csv(t), schema) == t);
}

TEST_CASE("from_csv validates header and values") {
  TableSchema schema;
  schema.table_name = "t";
  schema.columns = {{"n", ColumnType::Int64, false}};
  CHECK_THROWS_AS((void)csv::from_csv("wrong\r\n1\r\n", schema), DecodingError);
  CHECK_THROWS_AS((void)csv::from_csv("n\r\nnot-a-number\r\n", schema), DecodingError);
  // Null (empty unquoted field) in a non-nullable column.
  CHECK_THROWS_AS((void)csv::from_csv("n\r\n\r\n", schema), DecodingError);
}
