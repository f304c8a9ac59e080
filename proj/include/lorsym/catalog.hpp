#pragma once

#include <map>
#include <string>
#include <vector>

#include "lorsym/fields.hpp"
#include "lorsym/liealg.hpp"

namespace lorsym {

// Families of potentials admitting extra point symmetries, numbered as
// tables 5 through 10 so they continue the subalgebra tables 2 to 4 of
// optimal.hpp.  Tables 5 to 7 list the fields invariant under one, two and
// three generators beyond time translation; tables 8 to 10 are the subfamilies
// whose generators obey the variational scaling relation c8 = 2 c7 and hence
// carry first integrals.  Row n of a table pairs with row n of the matching
// subalgebra table.
enum class FieldTable { Sym2 = 5, Sym3 = 6, Sym4 = 7, Noe2 = 8, Noe3 = 9, Noe4 = 10 };

int tableIndex(FieldTable t);
std::string fieldTableName(FieldTable t);
FieldTable fieldTableFromName(const std::string& name);
int catalogRowCount(FieldTable t);
std::vector<FieldTable> allFieldTables();

// A catalog entry: table, row, values for the row's constants, and the free
// profile functions.  Profiles are expressions in the formal argument "u"
// (or "u1", "u2" for the two-argument tables 5 and 8); they may also mention
// the row's own constants.  Omitted params and profiles take row defaults.
struct CatalogKey {
  FieldTable table = FieldTable::Sym2;
  int row = 1;
  std::map<std::string, Rational> params;
  std::map<std::string, Expr> profiles;
};

struct CatalogRowInfo {
  std::string generators;                 // e.g. "{v4 + k1 v8, v7 + k2 v8}"
  std::vector<std::string> kParams;       // constants inside the generators
  std::vector<std::string> freeParams;    // constants inside the potentials
  std::vector<std::string> profileNames;  // subset of F1, F2, F3, G
  int profileArity = 0;                   // formal arguments per profile
  std::string caveat;                     // nonempty for rows needing a note
};

CatalogRowInfo catalogRowInfo(FieldTable t, int row);
std::string catalogRowReference(FieldTable t, int row);  // "Table 6 row 6"
bool catalogConditionsHold(FieldTable t, int row,
                           const std::map<std::string, Rational>& params);
std::map<std::string, Rational> catalogDefaultParams(FieldTable t, int row);
std::map<std::string, Expr> catalogDefaultProfiles(FieldTable t, int row);

// The row's symmetry generators with params substituted, as coefficient
// vectors over v1..v9 (the v9 slot stays zero).
std::vector<Vec9<Rational>> catalogGenerators(FieldTable t, int row,
                                              const std::map<std::string, Rational>& params);

// Instantiates a row into a concrete FieldSpec.  Throws std::invalid_argument
// when a side condition fails, a name is not known to the row, or a profile
// mentions symbols other than its formal arguments and the row constants.
FieldSpec catalogInstance(const CatalogKey& key);

// The dipole field A = (-y, x, 0) / r^3, Phi = 0, written in a form valid on
// the whole punctured space (table 6 row 6 at k1 = 0, k2 = 3 restricted to
// z > 0 agrees with it).
FieldSpec stormerField();

// The radial field B = lambda (x, y, z) / r^3 from table 7 row 5; phiOfR is a
// profile in "u" (= r) for the scalar potential.
FieldSpec monopoleField(Rational lambda = Rational(1), const Expr& phiOfR = Expr::zero());

struct CatalogMatch {
  FieldTable table = FieldTable::Sym2;
  int row = 1;
  std::map<std::string, Rational> params;  // fitted generator constants
  double residual = 0.0;
  std::string reference;  // catalogRowReference(table, row)
};

// Fits each row's generator pattern inside the span of the detected basis
// (least squares over the row constants and span coordinates) and keeps rows
// whose fit residual stays below tol and whose side conditions hold at the
// fitted constants.  The table searched matches min(basis.size(), 3) and the
// Noether flag.  Matches come back in row order.
std::vector<CatalogMatch> matchDetectedSpan(const std::vector<Vec8<double>>& basis,
                                            bool noether, double tol = 1e-6);

// "Table 6 row 6 (k1=0,k2=3)"; the parenthesis is dropped for rows without
// generator constants.
std::string catalogMatchLabel(const CatalogMatch& match);

std::string formatRational(const Rational& r);  // "3", "-1/2"

}  // namespace lorsym
