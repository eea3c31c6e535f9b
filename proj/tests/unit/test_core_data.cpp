#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fluocnn/data/dataset.hpp"
#include "fluocnn/error.hpp"
#include "fluocnn/kv_config.hpp"
#include "fluocnn/text_io.hpp"
#include "oracles.hpp"

using namespace fluocnn;
using namespace fluocnn::data;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::internal_consistency;
}

Dataset tiny_dataset(int reps) {
  Dataset ds;
  ds.grid = std::make_shared<const WavelengthGrid>(WavelengthGrid::linear(400, 700, 8));
  ds.repetitions_per_oil = reps;
  const auto records = parse_labels(
      "oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality\n"
      "A,0.2,5,0.12,1.6,10,EVOO\n"
      "B,0.9,-,-,-,-,LOO\n"
      "C,0.3,7,0.13,1.7,,VOO\n");
  ds.records = records;
  for (const auto& r : records) {
    for (int rep = 1; rep <= reps; ++rep) {
      Spectrum s;
      s.grid = ds.grid;
      s.oil_id = r.oil_id;
      s.repetition = rep;
      s.intensities = {1, 2, 3, 4, 5, 6, 7, static_cast<double>(8 + rep)};
      ds.spectra.push_back(s);
    }
  }
  return ds;
}

}  // namespace

TEST(SubtractDark, Elementwise) {
  const std::vector<double> raw{5, 5, 5};
  EXPECT_EQ(subtract_dark(raw, std::vector<double>{1, 2, 3}), (std::vector<double>{4, 3, 2}));
  EXPECT_EQ(subtract_dark(raw, raw), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(subtract_dark(raw, std::vector<double>{0, 0, 0}), raw);
  EXPECT_EQ(subtract_dark(std::vector<double>{1}, std::vector<double>{3})[0], -2.0);
  EXPECT_EQ(kind_of([&] { subtract_dark(raw, std::vector<double>{1, 2}); }), ErrorKind::dimension);
}

TEST(Normalize, HandComputedThreePoints) {
  // mean 2, population std sqrt(2/3)
  const auto z = normalize_values(std::vector<double>{1, 2, 3});
  const double e = 1.0 / std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(z[0], -e, 1e-12);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], e, 1e-12);
  EXPECT_NEAR(e, 1.2247, 1e-4);
}

TEST(Normalize, ConstantIsDegenerate) {
  EXPECT_EQ(kind_of([] { normalize_values(std::vector<double>{4, 4, 4}); }),
            ErrorKind::degenerate_spectrum);
}

TEST(Normalize, AlreadyNormalizedSpectrumIsRejected) {
  Spectrum s;
  s.grid = std::make_shared<const WavelengthGrid>(WavelengthGrid::linear(1, 3, 3));
  s.intensities = {1, 2, 3};
  const auto n = normalize(s);
  EXPECT_TRUE(n.normalized);
  EXPECT_EQ(kind_of([&] { normalize(n); }), ErrorKind::domain);
}

TEST(Normalize, RandomSpectraProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(0.01, 1e4);
  std::uniform_real_distribution<double> shift(-1e3, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::uniform(rng, 2 + trial % 300, 0.0, 100.0);
    const auto z = normalize_values(x);
    const auto m = population_moments(z);
    EXPECT_LT(std::abs(m.mean), 1e-9);
    EXPECT_LT(std::abs(m.std - 1.0), 1e-9);

    const auto zz = normalize_values(z);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(zz[i], z[i], 1e-9);

    const double a = scale(rng);
    const double b = shift(rng);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto zy = normalize_values(y);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(zy[i], z[i], 1e-6);
  }
}

TEST(Normalize, TwoPointCaseIsExact) {
  const auto z = normalize_values(std::vector<double>{3, 7});
  EXPECT_EQ(z[0], -1.0);
  EXPECT_EQ(z[1], 1.0);
}

TEST(WavelengthGrid, Invariants) {
  EXPECT_EQ(kind_of([] { WavelengthGrid({1.0}); }), ErrorKind::dimension);
  EXPECT_EQ(kind_of([] { WavelengthGrid({1.0, 1.0}); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { WavelengthGrid({2.0, 1.0}); }), ErrorKind::domain);
  const auto g = WavelengthGrid::linear(350, 800, 1024);
  EXPECT_EQ(g.size(), 1024u);
  EXPECT_EQ(g[0], 350.0);
  EXPECT_EQ(g[1023], 800.0);
  EXPECT_EQ(g.nearest_pixel(350.1), 0u);
  EXPECT_EQ(g, WavelengthGrid::linear(350, 800, 1024));
}

TEST(Excitation, OnlyTwoWavelengths) {
  EXPECT_EQ(excitation_from_nm(365), Excitation::nm365);
  EXPECT_EQ(excitation_from_nm(395), Excitation::nm395);
  EXPECT_EQ(kind_of([] { excitation_from_nm(405); }), ErrorKind::unsupported_excitation);
}

TEST(Labels, ExampleRows) {
  const auto recs = parse_labels(
      "oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality\n"
      "D03,0.35,8.4,0.123,1.435,26,VOO\n"
      "D51,2.16,-,-,-,-,LOO\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].oil_id, "D03");
  EXPECT_EQ(*recs[0].value(ParameterId::acidity), 0.35);
  EXPECT_EQ(*recs[0].value(ParameterId::peroxide), 8.4);
  EXPECT_EQ(*recs[0].value(ParameterId::k270), 0.123);
  EXPECT_EQ(*recs[0].value(ParameterId::k232), 1.435);
  EXPECT_EQ(*recs[0].value(ParameterId::ethyl_esters), 26.0);
  EXPECT_EQ(*recs[0].quality, Grade::voo);
  EXPECT_EQ(*recs[1].value(ParameterId::acidity), 2.16);
  for (auto p : {ParameterId::peroxide, ParameterId::k270, ParameterId::k232,
                 ParameterId::ethyl_esters}) {
    EXPECT_FALSE(recs[1].has(p));
  }
  EXPECT_EQ(*recs[1].quality, Grade::loo);
}

TEST(Labels, MalformedRowCarriesRowNumber) {
  try {
    parse_labels("oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality\n"
                 "D03,0.35,8.4,0.123,1.435,26,VOO\n"
                 "D04,0.34,8.6\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
}

TEST(Labels, DuplicatesNegativesAndGrades) {
  const std::string header = "oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality\n";
  EXPECT_EQ(kind_of([&] { parse_labels(header + "A,1,1,1,1,1,VOO\nA,1,1,1,1,1,VOO\n"); }),
            ErrorKind::duplicate);
  EXPECT_EQ(kind_of([&] { parse_labels(header + "A,-1,1,1,1,1,VOO\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([&] { parse_labels(header + "A,1,1,1,1,1,GOOD\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([&] { parse_labels("oil,acidity\nA,1\n"); }), ErrorKind::parse);
}

TEST(Labels, PredictionsHeaderWithoutQuality) {
  const auto recs = parse_labels("oil_id,acidity,peroxide,k270,k232,ethyl_esters\nX,0.5,,-,1.5,\n",
                                 /*require_quality=*/false);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].quality.has_value());
  EXPECT_FALSE(recs[0].has(ParameterId::peroxide));
  EXPECT_EQ(*recs[0].value(ParameterId::k232), 1.5);
  EXPECT_EQ(kind_of([&] {
              parse_labels("oil_id,acidity,peroxide,k270,k232,ethyl_esters\nX,0.5,,-,1.5,\n");
            }),
            ErrorKind::parse);
}

TEST(Labels, RenderRoundTrip) {
  const auto recs = load_labels(oracle::source_path("data/oil_labels.csv"));
  EXPECT_EQ(parse_labels(render_labels(recs)).size(), recs.size());
  const auto again = parse_labels(render_labels(recs));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(again[i].values, recs[i].values);
    EXPECT_EQ(again[i].quality, recs[i].quality);
  }
}

TEST(Labels, BundledCounts) {
  const auto recs = load_labels(oracle::source_path("data/oil_labels.csv"));
  ASSERT_EQ(recs.size(), 22u);
  EXPECT_EQ(records_with(recs, ParameterId::acidity).size(), 22u);
  EXPECT_EQ(records_with(recs, ParameterId::peroxide).size(), 21u);
  EXPECT_EQ(records_with(recs, ParameterId::k270).size(), 18u);
  EXPECT_EQ(records_with(recs, ParameterId::k232).size(), 18u);
  EXPECT_EQ(records_with(recs, ParameterId::ethyl_esters).size(), 18u);
  for (const auto& r : records_with(recs, ParameterId::peroxide)) EXPECT_NE(r.oil_id, "D51");
}

TEST(ExperimentalErrors, Parse) {
  const auto e = parse_experimental_errors("oil_id,exp_error\nD03,0.05\nD04,0.1\n");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1].oil_id, "D04");
  EXPECT_EQ(e[1].exp_error, 0.1);
  EXPECT_EQ(kind_of([] { parse_experimental_errors("oil,err\n"); }), ErrorKind::parse);
}

TEST(Dataset, ValidateAndFilter) {
  auto ds = tiny_dataset(3);
  ds.validate();
  EXPECT_EQ(ds.spectra.size(), 9u);

  const auto perox = filter_for_parameter(ds, ParameterId::peroxide);
  EXPECT_EQ(perox.oil_count(), 2u);
  EXPECT_EQ(perox.spectra.size(), 3u * perox.oil_count());
  const auto twice = filter_for_parameter(perox, ParameterId::peroxide);
  EXPECT_EQ(twice.oil_count(), perox.oil_count());
  EXPECT_EQ(twice.spectra.size(), perox.spectra.size());

  const auto ee = filter_for_parameter(ds, ParameterId::ethyl_esters);
  EXPECT_EQ(ee.oil_count(), 1u);

  auto only_b = ds;
  only_b.records.erase(only_b.records.begin());
  only_b.records.erase(only_b.records.begin() + 1);
  std::erase_if(only_b.spectra, [](const Spectrum& s) { return s.oil_id != "B"; });
  EXPECT_EQ(kind_of([&] { filter_for_parameter(only_b, ParameterId::k270); }),
            ErrorKind::empty_dataset);
}

TEST(Dataset, ValidateRejectsBrokenInvariants) {
  auto missing_record = tiny_dataset(2);
  missing_record.records.pop_back();
  EXPECT_THROW(missing_record.validate(), Error);

  auto wrong_count = tiny_dataset(2);
  wrong_count.spectra.pop_back();
  EXPECT_THROW(wrong_count.validate(), Error);

  auto wrong_length = tiny_dataset(2);
  wrong_length.spectra[0].intensities.pop_back();
  EXPECT_THROW(wrong_length.validate(), Error);

  auto other_grid = tiny_dataset(2);
  other_grid.spectra[0].grid =
      std::make_shared<const WavelengthGrid>(WavelengthGrid::linear(400, 701, 8));
  EXPECT_THROW(other_grid.validate(), Error);
}

TEST(Dataset, PrepareSubtractsDarkThenNormalizes) {
  auto ds = tiny_dataset(1);
  const std::vector<double> dark(8, 1.0);
  const auto p = prepare(ds, std::span<const double>(dark));
  for (const auto& s : p.spectra) {
    EXPECT_TRUE(s.normalized);
    const auto m = population_moments(s.intensities);
    EXPECT_NEAR(m.mean, 0.0, 1e-12);
    EXPECT_NEAR(m.std, 1.0, 1e-12);
  }
  // A constant dark offset cannot change the normalized shape.
  const auto q = prepare(ds);
  for (std::size_t i = 0; i < p.spectra.size(); ++i) {
    for (std::size_t k = 0; k < 8; ++k) {
      EXPECT_NEAR(p.spectra[i].intensities[k], q.spectra[i].intensities[k], 1e-12);
    }
  }
}

TEST(Dataset, FileRoundTripIsBitwise) {
  auto ds = tiny_dataset(2);
  std::mt19937_64 rng(5);
  for (auto& s : ds.spectra) s.intensities = oracle::uniform(rng, 8, 0, 1e5);
  const auto dir = std::filesystem::temp_directory_path() / "fluocnn_test_roundtrip";
  std::filesystem::remove_all(dir);
  write_dataset(ds, dir);
  const auto back = read_dataset(DatasetFiles::in(dir));
  ASSERT_EQ(back.spectra.size(), ds.spectra.size());
  EXPECT_EQ(*back.grid, *ds.grid);
  for (std::size_t i = 0; i < ds.spectra.size(); ++i) {
    EXPECT_EQ(back.spectra[i].intensities, ds.spectra[i].intensities);
    EXPECT_EQ(back.spectra[i].oil_id, ds.spectra[i].oil_id);
    EXPECT_EQ(back.spectra[i].repetition, ds.spectra[i].repetition);
  }
  EXPECT_EQ(back.repetitions_per_oil, 2);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, SpectraCsvRejectsWrongWidth) {
  const auto grid = std::make_shared<const WavelengthGrid>(WavelengthGrid::linear(1, 3, 3));
  EXPECT_EQ(kind_of([&] {
              parse_spectra_csv("oil_id,excitation_nm,repetition,i_0,i_1,i_2\nA,395,1,1,2\n", grid);
            }),
            ErrorKind::parse);
  EXPECT_EQ(kind_of([&] {
              parse_spectra_csv("oil_id,excitation_nm,repetition,i_0,i_1,i_2\nA,405,1,1,2,3\n",
                                grid);
            }),
            ErrorKind::unsupported_excitation);
}

TEST(TextIo, ShortestRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(text::parse_double(text::format_double(x)), x);
  }
  EXPECT_EQ(text::format_double(0.1), "0.1");
  EXPECT_THROW(text::parse_double("1.2.3"), Error);
}

TEST(KeyValueConfig, Grammar) {
  const auto kv = KeyValueConfig::parse(
      "# comment\n\nseed = 7\nnoise_sigma=0.02   # trailing\npeak.0.excitation = 365,395\n");
  EXPECT_EQ(kv.get_integer("seed", 0), 7);
  EXPECT_EQ(kv.get_double("noise_sigma", 0), 0.02);
  EXPECT_EQ(kv.get_string("peak.0.excitation", ""), "365,395");
  EXPECT_FALSE(kv.contains("missing"));
  EXPECT_EQ(KeyValueConfig::parse(kv.render()).entries(), kv.entries());
  EXPECT_EQ(kind_of([] { KeyValueConfig::parse("a = 1\na = 2\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { KeyValueConfig::parse("no equals sign\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { KeyValueConfig::parse("bad key! = 1\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([&] { kv.require_double("absent"); }), ErrorKind::config);
}
