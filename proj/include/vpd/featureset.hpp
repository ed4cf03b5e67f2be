// Copyright 2026 The vpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vpd/audio.hpp"
#include "vpd/corpus.hpp"
#include "vpd/csv.hpp"
#include "vpd/error.hpp"
#include "vpd/matrix.hpp"
#include "vpd/pitch.hpp"
#include "vpd/spectral.hpp"

namespace vpd {

// Complete per-recording feature record. Estimators mark failures with NaN
// (pitch tracking, insufficient cycles, missing formants); extraction
// replaces every non-finite value with zero before the record is stored, so
// persisted vectors are always finite and the nan flag column is the only
// trace of a pitch-tracking failure. Hand-built records may still carry NaN;
// materialize applies the same replacement defensively.
struct FeatureVector {
  std::string file_name;
  std::string talker_id;
  Sex sex = Sex::female;
  int label = 0;
  double age = 0.0;

  double f0_mean = std::numeric_limits<double>::quiet_NaN();
  double f0_std = std::numeric_limits<double>::quiet_NaN();
  double pitch_diff = std::numeric_limits<double>::quiet_NaN();
  double nan_flag = 0.0;
  double hnr = std::numeric_limits<double>::quiet_NaN();
  double jitta = std::numeric_limits<double>::quiet_NaN();
  double shim = std::numeric_limits<double>::quiet_NaN();
  double entropy = 0.0;
  double skewness = 0.0;
  double centroid = 0.0;
  double flatness = 0.0;
  double rolloff = 0.0;
  double zcr = 0.0;
  std::array<double, 7> contrast{};
  std::array<double, 20> lfcc{};
  std::array<double, 3> formants{};

  std::array<double, 13> mfcc13_mean{}, mfcc13_delta{}, mfcc13_delta2{};
  std::array<double, 13> mfcc13_var{},  mfcc13_dvar{},  mfcc13_ddvar{};
  std::array<double, 20> mfcc20_mean{}, mfcc20_delta{}, mfcc20_delta2{};
  std::array<double, 20> mfcc20_var{},  mfcc20_dvar{},  mfcc20_ddvar{};
};

struct FeatureExtractionConfig {
  double trim_threshold_db = 15.0;
  std::size_t trim_frame = 2048;
  std::size_t trim_hop = 512;
  std::size_t fft_size = 2048;
  std::size_t hop = 512;
  std::size_t n_filters = 128;
  PitchConfig pitch;
};

// Extract every feature from one already-trimmed recording.
inline FeatureVector extract_features(const SessionRecord& rec,
                                      const AudioBuffer& trimmed,
                                      const FeatureExtractionConfig& cfg) {
  if (trimmed.samples.empty()) {
    throw DataError("extract_features: empty audio for " + rec.file_name);
  }
  FeatureVector fv;
  fv.file_name = rec.file_name;
  fv.talker_id = rec.talker_id;
  fv.sex = rec.sex;
  fv.label = rec.label();
  fv.age = static_cast<double>(rec.age);

  const PitchFeatures pf =
      compute_pitch_features(trimmed.samples, trimmed.sample_rate, cfg.pitch);
  fv.f0_mean = pf.f0_mean_hz;
  fv.f0_std = pf.f0_std_hz;
  fv.pitch_diff = pf.pitch_difference;
  fv.nan_flag = pf.estimation_failed ? 1.0 : 0.0;
  fv.hnr = pf.hnr_db;
  fv.jitta = pf.jitter_abs_sec;
  fv.shim = pf.shimmer_rel;

  const SpectralFeatures sf = compute_spectral_features(
      trimmed.samples, trimmed.sample_rate, cfg.fft_size, cfg.hop);
  fv.entropy = sf.entropy_bits;
  fv.skewness = sf.skewness;
  fv.centroid = sf.centroid_hz;
  fv.flatness = sf.flatness;
  fv.rolloff = sf.rolloff_hz;
  fv.zcr = sf.zcr;
  fv.contrast = sf.contrast_db;

  CepstrumConfig lin;
  lin.fft_size = cfg.fft_size;
  lin.hop = cfg.hop;
  lin.n_filters = cfg.n_filters;
  lin.n_coeffs = 20;
  lin.mel_scale = false;
  const auto lfcc_means =
      column_means(cepstral_coefficients(trimmed.samples,
                                         trimmed.sample_rate, lin));
  for (std::size_t i = 0; i < 20; ++i) fv.lfcc[i] = lfcc_means[i];

  const FormantFeatures ff = compute_formants(trimmed);
  fv.formants = {ff.f1_hz, ff.f2_hz, ff.f3_hz};

  const auto fill_mfcc = [&](std::size_t n_coeffs, auto& mean, auto& delta,
                             auto& delta2, auto& var, auto& dvar,
                             auto& ddvar) {
    CepstrumConfig mc;
    mc.fft_size = cfg.fft_size;
    mc.hop = cfg.hop;
    mc.n_filters = cfg.n_filters;
    mc.n_coeffs = n_coeffs;
    mc.mel_scale = true;
    const Matrix cc = cepstral_coefficients(trimmed.samples,
                                            trimmed.sample_rate, mc);
    const Matrix d = delta_features(cc);
    const Matrix dd = delta_features(d);
    const auto cm = column_means(cc), dm = column_means(d),
               ddm = column_means(dd);
    const auto cv = column_variances(cc), dv = column_variances(d),
               ddv = column_variances(dd);
    for (std::size_t i = 0; i < n_coeffs; ++i) {
      mean[i] = cm[i];
      delta[i] = dm[i];
      delta2[i] = ddm[i];
      var[i] = cv[i];
      dvar[i] = dv[i];
      ddvar[i] = ddv[i];
    }
  };
  fill_mfcc(13, fv.mfcc13_mean, fv.mfcc13_delta, fv.mfcc13_delta2,
            fv.mfcc13_var, fv.mfcc13_dvar, fv.mfcc13_ddvar);
  fill_mfcc(20, fv.mfcc20_mean, fv.mfcc20_delta, fv.mfcc20_delta2,
            fv.mfcc20_var, fv.mfcc20_dvar, fv.mfcc20_ddvar);

  // Stored records are always finite: estimator failures arrive as NaN and
  // are replaced by zero here, with nan_flag recording a pitch failure.
  const auto scrub = [](double& v) {
    if (!std::isfinite(v)) v = 0.0;
  };
  scrub(fv.f0_mean);
  scrub(fv.f0_std);
  scrub(fv.pitch_diff);
  scrub(fv.hnr);
  scrub(fv.jitta);
  scrub(fv.shim);
  scrub(fv.entropy);
  scrub(fv.skewness);
  scrub(fv.centroid);
  scrub(fv.flatness);
  scrub(fv.rolloff);
  scrub(fv.zcr);
  for (double& v : fv.contrast) scrub(v);
  for (double& v : fv.lfcc) scrub(v);
  for (double& v : fv.formants) scrub(v);
  const auto scrub13 = [&](std::array<double, 13>& a) {
    for (double& v : a) scrub(v);
  };
  const auto scrub20 = [&](std::array<double, 20>& a) {
    for (double& v : a) scrub(v);
  };
  scrub13(fv.mfcc13_mean);
  scrub13(fv.mfcc13_delta);
  scrub13(fv.mfcc13_delta2);
  scrub13(fv.mfcc13_var);
  scrub13(fv.mfcc13_dvar);
  scrub13(fv.mfcc13_ddvar);
  scrub20(fv.mfcc20_mean);
  scrub20(fv.mfcc20_delta);
  scrub20(fv.mfcc20_delta2);
  scrub20(fv.mfcc20_var);
  scrub20(fv.mfcc20_dvar);
  scrub20(fv.mfcc20_ddvar);
  return fv;
}

// ---------------------------------------------------------------------------
// Feature subset enumeration.
//
// A subset is 12 optional-feature switches plus one MFCC option. Identifiers
// pack the switches into a counter (bit i = switch i below) and multiply by
// five, with the MFCC option innermost:
//   id = switch_counter * 5 + mfcc_option.
// The five mandatory columns (f0_mean, hnr, jitta, shim, age) are always
// present.
// ---------------------------------------------------------------------------

enum class MfccOption : int {
  none = 0,
  m13 = 1,
  m20 = 2,
  m13_with_var = 3,
  m20_with_var = 4,
};

constexpr int kNumSwitches = 12;
constexpr int kNumMfccOptions = 5;
constexpr int kNumSubsets = (1 << kNumSwitches) * kNumMfccOptions;  // 20480

struct SubsetConfig {
  int id = 0;
  bool std_f0 = false;
  bool nan_flag = false;
  bool pitch_diff = false;
  bool entropy = false;
  bool lfcc = false;
  bool formants = false;
  bool skewness = false;
  bool centroid = false;
  bool contrast = false;
  bool flatness = false;
  bool rolloff = false;
  bool zcr = false;
  MfccOption mfcc = MfccOption::none;
};

inline SubsetConfig subset_from_id(int id) {
  if (id < 0 || id >= kNumSubsets) {
    throw ValidationError("subset id out of range: " + std::to_string(id));
  }
  SubsetConfig s;
  s.id = id;
  const int counter = id / kNumMfccOptions;
  s.mfcc = static_cast<MfccOption>(id % kNumMfccOptions);
  s.std_f0 = (counter >> 0) & 1;
  s.nan_flag = (counter >> 1) & 1;
  s.pitch_diff = (counter >> 2) & 1;
  s.entropy = (counter >> 3) & 1;
  s.lfcc = (counter >> 4) & 1;
  s.formants = (counter >> 5) & 1;
  s.skewness = (counter >> 6) & 1;
  s.centroid = (counter >> 7) & 1;
  s.contrast = (counter >> 8) & 1;
  s.flatness = (counter >> 9) & 1;
  s.rolloff = (counter >> 10) & 1;
  s.zcr = (counter >> 11) & 1;
  return s;
}

inline std::vector<SubsetConfig> enumerate_subsets() {
  std::vector<SubsetConfig> out;
  out.reserve(kNumSubsets);
  for (int id = 0; id < kNumSubsets; ++id) out.push_back(subset_from_id(id));
  return out;
}

inline int subset_column_count(const SubsetConfig& s) {
  int n = 5;  // mandatory block
  n += s.std_f0 + s.nan_flag + s.pitch_diff + s.entropy;
  n += s.lfcc ? 20 : 0;
  n += s.formants ? 3 : 0;
  n += s.skewness + s.centroid;
  n += s.contrast ? 7 : 0;
  n += s.flatness + s.rolloff + s.zcr;
  switch (s.mfcc) {
    case MfccOption::none: break;
    case MfccOption::m13: n += 39; break;
    case MfccOption::m20: n += 60; break;
    case MfccOption::m13_with_var: n += 78; break;
    case MfccOption::m20_with_var: n += 120; break;
  }
  return n;
}

// Design matrix for one cohort and subset.
struct DesignMatrix {
  Matrix x;
  std::vector<int> labels;
  std::vector<std::string> columns;
  std::vector<std::string> row_names;  // file names, row-aligned
};

namespace detail {

inline double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace detail

// Assemble the numeric matrix for a subset over one cohort. Column order is
// fixed: mandatory block, then enabled switches in declaration order, then
// the MFCC block (means, deltas, delta-deltas, then the three variance
// groups when selected). Non-finite feature values become zero.
inline DesignMatrix materialize(const std::vector<FeatureVector>& vectors,
                                const SubsetConfig& subset, Cohort cohort) {
  DesignMatrix dm;
  auto add_col = [&](const std::string& name) { dm.columns.push_back(name); };
  add_col("f0_mean");
  add_col("hnr");
  add_col("jitta");
  add_col("shim");
  add_col("age");
  if (subset.std_f0) add_col("f0_std");
  if (subset.nan_flag) add_col("nan");
  if (subset.pitch_diff) add_col("pitch_diff");
  if (subset.entropy) add_col("entropy");
  if (subset.lfcc) {
    for (int i = 0; i < 20; ++i) add_col("lfcc_" + std::to_string(i));
  }
  if (subset.formants) {
    add_col("f1");
    add_col("f2");
    add_col("f3");
  }
  if (subset.skewness) add_col("skewness");
  if (subset.centroid) add_col("centroid");
  if (subset.contrast) {
    for (int i = 0; i < 7; ++i) add_col("contrast_" + std::to_string(i));
  }
  if (subset.flatness) add_col("flatness");
  if (subset.rolloff) add_col("rolloff");
  if (subset.zcr) add_col("zcr");
  const int n_mfcc = (subset.mfcc == MfccOption::m13 ||
                      subset.mfcc == MfccOption::m13_with_var)
                         ? 13
                         : 20;
  const bool has_mfcc = subset.mfcc != MfccOption::none;
  const bool has_var = subset.mfcc == MfccOption::m13_with_var ||
                       subset.mfcc == MfccOption::m20_with_var;
  if (has_mfcc) {
    const std::string p = "mfcc" + std::to_string(n_mfcc);
    for (int i = 0; i < n_mfcc; ++i) add_col(p + "_mean_" + std::to_string(i));
    for (int i = 0; i < n_mfcc; ++i) {
      add_col(p + "_delta_" + std::to_string(i));
    }
    for (int i = 0; i < n_mfcc; ++i) {
      add_col(p + "_delta2_" + std::to_string(i));
    }
    if (has_var) {
      for (int i = 0; i < n_mfcc; ++i) add_col(p + "_var_" + std::to_string(i));
      for (int i = 0; i < n_mfcc; ++i) {
        add_col(p + "_dvar_" + std::to_string(i));
      }
      for (int i = 0; i < n_mfcc; ++i) {
        add_col(p + "_ddvar_" + std::to_string(i));
      }
    }
  }

  dm.x = Matrix(0, dm.columns.size());
  std::vector<double> row;
  for (const auto& fv : vectors) {
    if (cohort == Cohort::female && fv.sex != Sex::female) continue;
    if (cohort == Cohort::male && fv.sex != Sex::male) continue;
    row.clear();
    const auto put = [&](double v) {
      row.push_back(detail::finite_or_zero(v));
    };
    put(fv.f0_mean);
    put(fv.hnr);
    put(fv.jitta);
    put(fv.shim);
    put(fv.age);
    if (subset.std_f0) put(fv.f0_std);
    if (subset.nan_flag) put(fv.nan_flag);
    if (subset.pitch_diff) put(fv.pitch_diff);
    if (subset.entropy) put(fv.entropy);
    if (subset.lfcc) {
      for (const double v : fv.lfcc) put(v);
    }
    if (subset.formants) {
      for (const double v : fv.formants) put(v);
    }
    if (subset.skewness) put(fv.skewness);
    if (subset.centroid) put(fv.centroid);
    if (subset.contrast) {
      for (const double v : fv.contrast) put(v);
    }
    if (subset.flatness) put(fv.flatness);
    if (subset.rolloff) put(fv.rolloff);
    if (subset.zcr) put(fv.zcr);
    if (has_mfcc) {
      const auto put_block = [&](const auto& a13, const auto& a20) {
        if (n_mfcc == 13) {
          for (int i = 0; i < 13; ++i) put(a13[i]);
        } else {
          for (int i = 0; i < 20; ++i) put(a20[i]);
        }
      };
      put_block(fv.mfcc13_mean, fv.mfcc20_mean);
      put_block(fv.mfcc13_delta, fv.mfcc20_delta);
      put_block(fv.mfcc13_delta2, fv.mfcc20_delta2);
      if (has_var) {
        put_block(fv.mfcc13_var, fv.mfcc20_var);
        put_block(fv.mfcc13_dvar, fv.mfcc20_dvar);
        put_block(fv.mfcc13_ddvar, fv.mfcc20_ddvar);
      }
    }
    dm.x.append_row(row);
    dm.labels.push_back(fv.label);
    dm.row_names.push_back(fv.file_name);
  }
  return dm;
}

// ---------------------------------------------------------------------------
// Feature CSV round trip.
// ---------------------------------------------------------------------------

namespace detail {

inline void feature_column_names(std::vector<std::string>& cols) {
  cols = {"file_name", "talker_id", "sex",      "age",      "label",
          "f0_mean",   "f0_std",    "pitch_diff", "nan",    "hnr",
          "jitta",     "shim",      "entropy",  "skewness", "centroid",
          "flatness",  "rolloff",   "zcr"};
  for (int i = 0; i < 7; ++i) cols.push_back("contrast_" + std::to_string(i));
  for (int i = 0; i < 20; ++i) cols.push_back("lfcc_" + std::to_string(i));
  cols.push_back("f1");
  cols.push_back("f2");
  cols.push_back("f3");
  const auto block = [&](const std::string& p, int n) {
    for (int i = 0; i < n; ++i) cols.push_back(p + "_mean_" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
      cols.push_back(p + "_delta_" + std::to_string(i));
    }
    for (int i = 0; i < n; ++i) {
      cols.push_back(p + "_delta2_" + std::to_string(i));
    }
    for (int i = 0; i < n; ++i) cols.push_back(p + "_var_" + std::to_string(i));
    for (int i = 0; i < n; ++i) cols.push_back(p + "_dvar_" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
      cols.push_back(p + "_ddvar_" + std::to_string(i));
    }
  };
  block("mfcc13", 13);
  block("mfcc20", 20);
}

inline std::string feature_number(double v) {
  if (std::isnan(v)) return "nan";
  return format_fixed12(v);
}

inline double parse_feature_number(const std::string& s) {
  if (s == "nan" || s == "NaN") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw FormatError("features: bad number '" + s + "'");
  }
}

}  // namespace detail

inline void write_features_csv(const std::string& path,
                               const std::vector<FeatureVector>& vectors) {
  std::vector<std::string> cols;
  detail::feature_column_names(cols);
  csv::Writer w(cols);
  std::vector<std::string> row;
  for (const auto& fv : vectors) {
    row.clear();
    row.push_back(fv.file_name);
    row.push_back(fv.talker_id);
    row.push_back(fv.sex == Sex::female ? "f" : "m");
    row.push_back(detail::feature_number(fv.age));
    row.push_back(std::to_string(fv.label));
    const auto num = [&](double v) {
      row.push_back(detail::feature_number(v));
    };
    num(fv.f0_mean);
    num(fv.f0_std);
    num(fv.pitch_diff);
    num(fv.nan_flag);
    num(fv.hnr);
    num(fv.jitta);
    num(fv.shim);
    num(fv.entropy);
    num(fv.skewness);
    num(fv.centroid);
    num(fv.flatness);
    num(fv.rolloff);
    num(fv.zcr);
    for (const double v : fv.contrast) num(v);
    for (const double v : fv.lfcc) num(v);
    for (const double v : fv.formants) num(v);
    const auto block13 = [&](const std::array<double, 13>& a) {
      for (const double v : a) num(v);
    };
    const auto block20 = [&](const std::array<double, 20>& a) {
      for (const double v : a) num(v);
    };
    block13(fv.mfcc13_mean);
    block13(fv.mfcc13_delta);
    block13(fv.mfcc13_delta2);
    block13(fv.mfcc13_var);
    block13(fv.mfcc13_dvar);
    block13(fv.mfcc13_ddvar);
    block20(fv.mfcc20_mean);
    block20(fv.mfcc20_delta);
    block20(fv.mfcc20_delta2);
    block20(fv.mfcc20_var);
    block20(fv.mfcc20_dvar);
    block20(fv.mfcc20_ddvar);
    w.add_row(row);
  }
  w.save(path);
}

inline std::vector<FeatureVector> read_features_csv(const std::string& path) {
  const auto rows = csv::parse_file(path);
  if (rows.empty()) throw FormatError("features: empty file " + path);
  std::vector<std::string> cols;
  detail::feature_column_names(cols);
  if (rows[0] != cols) {
    throw FormatError("features: unexpected header in " + path);
  }
  std::vector<FeatureVector> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != cols.size()) {
      throw FormatError("features: bad row " + std::to_string(r + 1));
    }
    FeatureVector fv;
    std::size_t i = 0;
    fv.file_name = row[i++];
    fv.talker_id = row[i++];
    fv.sex = parse_sex(row[i++]);
    fv.age = detail::parse_feature_number(row[i++]);
    fv.label = row[i] == "1" ? 1 : (row[i] == "0" ? 0 : -1);
    if (fv.label < 0) throw FormatError("features: bad label row " +
                                        std::to_string(r + 1));
    ++i;
    const auto num = [&]() {
      return detail::parse_feature_number(row[i++]);
    };
    fv.f0_mean = num();
    fv.f0_std = num();
    fv.pitch_diff = num();
    fv.nan_flag = num();
    fv.hnr = num();
    fv.jitta = num();
    fv.shim = num();
    fv.entropy = num();
    fv.skewness = num();
    fv.centroid = num();
    fv.flatness = num();
    fv.rolloff = num();
    fv.zcr = num();
    for (double& v : fv.contrast) v = num();
    for (double& v : fv.lfcc) v = num();
    for (double& v : fv.formants) v = num();
    const auto block13 = [&](std::array<double, 13>& a) {
      for (double& v : a) v = num();
    };
    const auto block20 = [&](std::array<double, 20>& a) {
      for (double& v : a) v = num();
    };
    block13(fv.mfcc13_mean);
    block13(fv.mfcc13_delta);
    block13(fv.mfcc13_delta2);
    block13(fv.mfcc13_var);
    block13(fv.mfcc13_dvar);
    block13(fv.mfcc13_ddvar);
    block20(fv.mfcc20_mean);
    block20(fv.mfcc20_delta);
    block20(fv.mfcc20_delta2);
    block20(fv.mfcc20_var);
    block20(fv.mfcc20_dvar);
    block20(fv.mfcc20_ddvar);
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace vpd
