#include <locale>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "rasch/errors.hpp"
#include "rasch/format.hpp"
#include "rasch/io.hpp"

using namespace rasch;

namespace {

ParameterFile parameters_from(const std::string& text) {
  std::istringstream in(text);
  return read_parameters(in);
}

Design design_from(const std::string& text) {
  std::istringstream in(text);
  return read_design(in);
}

}  // namespace

TEST(ReadParameters, Example) {
  const ParameterFile f =
      parameters_from(R"({"k": 4, "d": 2, "beta": {"": 0.5, "1": -0.3, "1,2": -0.1}})");
  EXPECT_EQ(f.model.k(), 4);
  EXPECT_EQ(f.model.d(), 2);
  EXPECT_EQ(f.theta.beta(0), 0.5);
  EXPECT_EQ(f.theta.beta(f.model.index_of(0b0001)), -0.3);
  EXPECT_EQ(f.theta.beta(f.model.index_of(0b0011)), -0.1);
  EXPECT_EQ(f.theta.beta(f.model.index_of(0b1000)), 0.0);
}

TEST(ReadParameters, MissingBetaIsZero) {
  const ParameterFile f = parameters_from(R"({"k": 2, "d": 1})");
  for (std::size_t i = 0; i < f.model.p(); ++i) EXPECT_EQ(f.theta.beta(i), 0.0);
}

TEST(ReadParameters, Errors) {
  EXPECT_THROW(parameters_from("{"), InvalidArgument);
  EXPECT_THROW(parameters_from("[1, 2]"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2})"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2.5, "d": 1})"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2, "d": 3})"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2, "d": 1, "beta": {"1,2": 0.1}})"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2, "d": 1, "beta": {"3": 0.1}})"), InvalidArgument);
  EXPECT_THROW(parameters_from(R"({"k": 2, "d": 1, "beta": {"1": "x"}})"), InvalidArgument);
  EXPECT_THROW(read_parameters_file("/nonexistent/params.json"), InvalidArgument);
}

TEST(ReadParameters, RoundTrip) {
  const InteractionModel m(3, 2);
  std::vector<double> b(m.p());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = -0.1 * static_cast<double>(i) + 1.0 / 3.0;
  const ParameterVector theta(m, b);
  const ParameterFile back = parameters_from(parameters_to_json(theta, m));
  EXPECT_EQ(back.model.k(), 3);
  EXPECT_EQ(back.model.d(), 2);
  EXPECT_EQ(back.theta.as_vector(), theta.as_vector());
}

TEST(ReadDesign, Example) {
  const Design w = design_from(R"({"k": 3, "weights": {"000": 0.25, "110": 0.75}})");
  EXPECT_EQ(w.k(), 3);
  EXPECT_EQ(w.support_size(), 2U);
  EXPECT_EQ(w.weight(0b000), 0.25);
  EXPECT_EQ(w.weight(0b011), 0.75);  // character i holds x_{i+1}
}

TEST(ReadDesign, Errors) {
  EXPECT_THROW(design_from(R"({"k": 2, "weights": {"00": 0.5, "01": 0.4}})"), InvalidArgument);
  EXPECT_THROW(design_from(R"({"k": 2, "weights": {"000": 1.0}})"), InvalidArgument);
  EXPECT_THROW(design_from(R"({"k": 2, "weights": {"00": 1.5, "01": -0.5}})"), InvalidArgument);
  EXPECT_THROW(design_from(R"({"k": 2, "weights": {"0a": 1.0}})"), InvalidArgument);
  EXPECT_THROW(design_from(R"({"k": 2})"), InvalidArgument);
}

TEST(ReadDesign, RoundTrip) {
  const Design w(3, {{0b000, 0.125}, {0b101, 0.375}, {0b111, 0.5}});
  EXPECT_EQ(design_from(design_to_json(w)), w);
}

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(1234567.891234567), "1234567.89123");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(FormatNumber, IgnoresLocale) {
  struct Comma : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
  };
  const std::locale previous = std::locale::global(std::locale(std::locale::classic(), new Comma));
  std::ostringstream probe;
  probe << 0.5;
  EXPECT_EQ(probe.str(), "0,5");  // the stream does honor the comma locale
  EXPECT_EQ(format_number(0.5), "0.5");
  std::locale::global(previous);
}
