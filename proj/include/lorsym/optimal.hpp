#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "lorsym/liealg.hpp"

namespace lorsym {

// Canonical form of a one-dimensional subalgebra: the row of the optimal
// system it lands in, the surviving parameters, and a replayable reduction.
// Replay semantics: apply the witness steps to the input in order, then
// multiply by scale; the result is the row representative. classId 0 marks
// generators outside the optimal system (nothing projects to a point
// symmetry, or only the scaling/shift directions survive).
struct CanonicalClass1D {
  int classId = 0;
  std::string degenerateReason;
  bool exact = true;
  std::map<std::string, Rational> paramsExact;  // populated on the exact path
  std::map<std::string, double> params;         // always populated
  std::vector<AdjointStep> witness;
  Rational scale = Rational(1);                 // meaningful on the exact path
  double scaleD = 1.0;
  Expr residualGauge = Expr::zero();            // input gauge part, untouched
};

CanonicalClass1D canonicalize1D(const EquivGenerator& V);

EquivGenerator representative1D(const CanonicalClass1D& c);
EquivGeneratorD representative1DNumeric(const CanonicalClass1D& c);

// Witness replay on the numeric mirror of the input.
EquivGeneratorD replayWitness(const CanonicalClass1D& c, const EquivGenerator& input);

// Closure and structure report for a 2- or 3-dimensional span.
struct SubalgebraReport {
  int dimension = 0;
  bool closed = false;
  // structure[i][j] holds the expansion of the bracket of basis i and j
  // over the basis, for i < j; exact rationals
  std::vector<std::vector<std::vector<Rational>>> structure;
  double gaugeResidual = 0.0;  // max sampled gradient mismatch of gauge parts
  int matchedTable = 0;        // 3 or 4 when a row template fits, else 0
  int matchedRow = 0;
  std::map<std::string, double> matchedParams;
  std::vector<std::string> constraintViolations;
};

SubalgebraReport checkSubalgebra(const std::vector<EquivGenerator>& basis, unsigned seed = 0);

// Row templates of the three optimal-system tables (table = 2, 3, 4).
int tableRowCount(int table);
std::vector<std::string> rowParamNames(int table, int row);
bool rowConditionsHold(int table, int row, const std::map<std::string, Rational>& params);
std::map<std::string, Rational> drawRowParams(int table, int row, std::mt19937& rng);
std::vector<EquivGenerator> instantiateRow(int table, int row,
                                           const std::map<std::string, Rational>& params);

// Discrete adjoint-stable features of a span, used to separate table rows.
struct SpanSignature {
  int dim = 0;
  int derivedDim = 0;       // finite-part dimension of the span of brackets
  int scalingImageDim = 0;  // dimension of the (c7, c8) image
  int scalingLine = 0;      // for a 1-dim image: 0 generic, 1 c8=0, 2 c7=0, 3 c7=c8, 4 c8=2c7
  int rotationRank = 0;     // dimension of the (c4, c5, c6) image
  int translationDim = 0;   // dimension of the span cut down to c4..c8 = 0

  bool operator==(const SpanSignature&) const = default;
};

SpanSignature spanSignature(const std::vector<EquivGenerator>& basis);

struct RowCheck {
  int table = 0;
  int row = 0;
  bool closed = false;
  bool conditionsHonored = false;
  bool selfMatched = false;  // the matcher recovers the row from its instance
  double gaugeResidual = 0.0;
  std::string note;
};

struct OptimalTablesReport {
  bool allClosed = false;
  std::vector<RowCheck> rows;
  // pairs of rows of the same table whose signatures coincide on every draw
  std::vector<std::string> needDeeperAnalysis;
  std::string json;
};

OptimalTablesReport verifyOptimalTables(unsigned seed = 0);

}  // namespace lorsym
