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

#include <array>

#include "ccf/emrgen.hpp"
#include "ccf/errors.hpp"

namespace ccf::emr {

namespace {

// Base weight 3.0 for the four exclusion-target conditions: the corpus is
// biased toward ear infections and bronchitis.
constexpr std::array<ConditionEntry, 20> kConditions{{
    {"Acute bronchitis", 3.0},
    {"Otitis media", 3.0},
    {"Acute bacterial sinusitis", 3.0},
    {"Sinusitis", 3.0},
    {"Viral sinusitis", 1.0},
    {"Streptococcal sore throat", 1.0},
    {"Acute viral pharyngitis", 1.0},
    {"Chronic sinusitis", 1.0},
    {"Hypertension", 1.0},
    {"Prediabetes", 1.0},
    {"Diabetes mellitus type 2", 1.0},
    {"Hyperlipidemia", 1.0},
    {"Asthma", 1.0},
    {"Seasonal allergic rhinitis", 1.0},
    {"Urinary tract infection", 1.0},
    {"Gastroesophageal reflux disease", 1.0},
    {"Iron deficiency anemia", 1.0},
    {"Migraine", 1.0},
    {"Osteoarthritis of knee", 1.0},
    {"Atopic dermatitis", 1.0},
}};

// Amoxicillin is the most commonly dispensed drug so the misuse query has a
// rich candidate set.
constexpr std::array<ConditionEntry, 12> kDrugs{{
    {"Amoxicillin", 3.0},
    {"Azithromycin", 1.0},
    {"Cefalexin", 1.0},
    {"Doxycycline", 1.0},
    {"Ibuprofen", 1.5},
    {"Acetaminophen", 1.5},
    {"Lisinopril", 1.0},
    {"Metformin", 1.0},
    {"Atorvastatin", 1.0},
    {"Albuterol", 1.0},
    {"Omeprazole", 1.0},
    {"Loratadine", 1.0},
}};

constexpr std::array<std::string_view, 4> kTableNames{"patients", "encounters", "conditions",
                                                      "prescriptions"};

constexpr std::array<std::string_view, 1> kPatientsSensitive{"patient_id"};
constexpr std::array<std::string_view, 2> kEncountersSensitive{"encounter_id", "patient_id"};
constexpr std::array<std::string_view, 4> kConditionsSensitive{"condition_id", "patient_id",
                                                               "encounter_id", "description"};
constexpr std::array<std::string_view, 4> kPrescriptionsSensitive{"prescription_id", "patient_id",
                                                                  "encounter_id", "drug"};

}  // namespace

std::span<const ConditionEntry> condition_catalog() { return kConditions; }
std::span<const ConditionEntry> drug_catalog() { return kDrugs; }
std::span<const std::string_view> table_names() { return kTableNames; }

TableSchema table_schema(std::string_view name) {
  if (name == "patients") {
    return TableSchema{"patients",
                       {{"patient_id", ColumnType::String, false},
                        {"birth_year", ColumnType::Int64, false},
                        {"gender", ColumnType::String, true}}};
  }
  if (name == "encounters") {
    return TableSchema{"encounters",
                       {{"encounter_id", ColumnType::String, false},
                        {"patient_id", ColumnType::String, false},
                        {"start_date", ColumnType::Date, false},
                        {"end_date", ColumnType::Date, false}}};
  }
  if (name == "conditions") {
    return TableSchema{"conditions",
                       {{"condition_id", ColumnType::String, false},
                        {"patient_id", ColumnType::String, false},
                        {"encounter_id", ColumnType::String, false},
                        {"onset_date", ColumnType::Date, false},
                        {"description", ColumnType::String, false}}};
  }
  if (name == "prescriptions") {
    return TableSchema{"prescriptions",
                       {{"prescription_id", ColumnType::String, false},
                        {"patient_id", ColumnType::String, false},
                        {"encounter_id", ColumnType::String, false},
                        {"start_date", ColumnType::Date, false},
                        {"drug", ColumnType::String, false}}};
  }
  throw SchemaError("unknown table '" + std::string(name) + "'");
}

std::span<const std::string_view> sensitive_columns(std::string_view table_name) {
  if (table_name == "patients") return kPatientsSensitive;
  if (table_name == "encounters") return kEncountersSensitive;
  if (table_name == "conditions") return kConditionsSensitive;
  if (table_name == "prescriptions") return kPrescriptionsSensitive;
  if (table_name == "misuse_result") {
    static constexpr std::array<std::string_view, 3> kResultSensitive{"patient_id", "encounter_id",
                                                                      "drug"};
    return kResultSensitive;
  }
  throw SchemaError("unknown table '" + std::string(table_name) + "'");
}

std::vector<std::string> master_key_ids(std::string_view table_name) {
  const std::string t(table_name);
  return {t + ".sensitive", t + ".other", t + ".footer"};
}

}  // namespace ccf::emr
