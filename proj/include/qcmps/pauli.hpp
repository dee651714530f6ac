#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcmps/errors.hpp"

namespace qcmps {

using Complex = std::complex<double>;

// Coefficients below this magnitude are dropped during canonicalization.
inline constexpr double kCoeffPruneTol = 1e-14;
// A sum is flagged Hermitian iff every coefficient satisfies |Im c| <= this.
inline constexpr double kHermitianTol = 1e-12;

enum class PauliAxis : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

Eigen::Matrix2cd axis_matrix(PauliAxis axis);
PauliAxis axis_from_char(char c);

// Dense-simulation qubit guard. Default 14, overridable via the
// QCMPS_GUARD_QUBITS environment variable.
int guard_qubits();

/// A tensor product of single-qubit Pauli operators on n_qubits qubits.
/// Identity factors are not stored; two strings with the same non-identity
/// entries compare equal. Qubit 0 is the most significant tensor factor
/// throughout this codebase.
class PauliString {
 public:
  explicit PauliString(int n_qubits);

  // Parses a token list like "X0 Z3 Y5". An empty string is the identity.
  static PauliString parse(int n_qubits, const std::string& tokens);

  int n_qubits() const { return n_qubits_; }
  PauliAxis axis(int qubit) const;
  void set(int qubit, PauliAxis axis);
  bool is_identity() const { return ops_.empty(); }
  const std::map<int, PauliAxis>& ops() const { return ops_; }

  std::string to_string() const;

  bool operator==(const PauliString& other) const;
  bool operator<(const PauliString& other) const;

 private:
  int n_qubits_;
  std::map<int, PauliAxis> ops_;  // qubit index -> non-identity axis
};

struct PauliTerm {
  Complex coeff;
  PauliString string;
};

/// A qubit Hamiltonian: a complex-weighted sum of Pauli strings, kept in
/// canonical form (terms sorted by string, duplicates merged, dust pruned).
class PauliSum {
 public:
  explicit PauliSum(int n_qubits);

  void add(Complex coeff, const PauliString& string);
  void add(const PauliSum& other);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool hermitian() const;

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

PauliSum parse_hamiltonian(std::istream& source);
PauliSum parse_hamiltonian_file(const std::string& path);
std::string serialize_hamiltonian(const PauliSum& h);

// Dense 2^n x 2^n matrix of the sum, qubit 0 as the most significant factor.
Eigen::MatrixXcd dense_matrix(const PauliSum& h, int max_qubits = guard_qubits());
Eigen::MatrixXcd dense_matrix(const PauliString& p);

// Jordan-Wigner particle-number operator: n/2 - (1/2) sum_i Z_i.
PauliSum build_number_operator(int n_qubits);

// Applies the string to a statevector of length 2^n, including Y phases.
Eigen::VectorXcd apply_to_statevector(const PauliString& p, const Eigen::VectorXcd& v);

}  // namespace qcmps
