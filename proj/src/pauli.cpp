#include "qcmps/pauli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qcmps {

using json = nlohmann::ordered_json;

Eigen::Matrix2cd axis_matrix(PauliAxis axis) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (axis) {
    case PauliAxis::I: m << 1, 0, 0, 1; break;
    case PauliAxis::X: m << 0, 1, 1, 0; break;
    case PauliAxis::Y: m << 0, -i, i, 0; break;
    case PauliAxis::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

PauliAxis axis_from_char(char c) {
  switch (c) {
    case 'I': return PauliAxis::I;
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default: throw ParseError(std::string("unknown Pauli axis letter '") + c + "'");
  }
}

int guard_qubits() {
  if (const char* env = std::getenv("QCMPS_GUARD_QUBITS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 14;
}

PauliString::PauliString(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("PauliString needs n_qubits >= 1");
}

PauliString PauliString::parse(int n_qubits, const std::string& tokens) {
  PauliString out(n_qubits);
  std::istringstream in(tokens);
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 2) throw ParseError("malformed Pauli token '" + tok + "'");
    const PauliAxis axis = axis_from_char(tok[0]);
    char* end = nullptr;
    const long q = std::strtol(tok.c_str() + 1, &end, 10);
    if (*end != '\0' || q < 0)
      throw ParseError("malformed qubit index in token '" + tok + "'");
    if (q >= n_qubits)
      throw ParseError("qubit index " + std::to_string(q) + " >= n_qubits " +
                       std::to_string(n_qubits) + " in token '" + tok + "'");
    out.set(static_cast<int>(q), axis);
  }
  return out;
}

PauliAxis PauliString::axis(int qubit) const {
  const auto it = ops_.find(qubit);
  return it == ops_.end() ? PauliAxis::I : it->second;
}

void PauliString::set(int qubit, PauliAxis axis) {
  if (qubit < 0 || qubit >= n_qubits_)
    throw std::out_of_range("qubit index out of range");
  if (axis == PauliAxis::I)
    ops_.erase(qubit);
  else
    ops_[qubit] = axis;
}

std::string PauliString::to_string() const {
  std::string out;
  for (const auto& [q, a] : ops_) {
    if (!out.empty()) out += ' ';
    out += static_cast<char>(a);
    out += std::to_string(q);
  }
  return out;
}

bool PauliString::operator==(const PauliString& other) const {
  return n_qubits_ == other.n_qubits_ && ops_ == other.ops_;
}

bool PauliString::operator<(const PauliString& other) const {
  return ops_ < other.ops_;
}

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("PauliSum needs n_qubits >= 1");
}

void PauliSum::add(Complex coeff, const PauliString& string) {
  if (string.n_qubits() != n_qubits_)
    throw std::invalid_argument("PauliString qubit count mismatch");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), string,
                             [](const PauliTerm& t, const PauliString& s) {
                               return t.string < s;
                             });
  if (it != terms_.end() && it->string == string) {
    it->coeff += coeff;
    if (std::abs(it->coeff) <= kCoeffPruneTol) terms_.erase(it);
  } else if (std::abs(coeff) > kCoeffPruneTol) {
    terms_.insert(it, PauliTerm{coeff, string});
  }
}

void PauliSum::add(const PauliSum& other) {
  if (other.n_qubits_ != n_qubits_)
    throw std::invalid_argument("PauliSum qubit count mismatch");
  for (const auto& t : other.terms_) add(t.coeff, t.string);
}

bool PauliSum::hermitian() const {
  for (const auto& t : terms_)
    if (std::abs(t.coeff.imag()) > kHermitianTol) return false;
  return true;
}

PauliSum parse_hamiltonian(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("hamiltonian file: ") + e.what());
  }
  if (!doc.contains("n_qubits") || !doc["n_qubits"].is_number_integer())
    throw ParseError("hamiltonian file: missing integer field 'n_qubits'");
  const int n = doc["n_qubits"].get<int>();
  if (n < 1) throw ParseError("hamiltonian file: n_qubits must be >= 1");
  PauliSum h(n);
  if (!doc.contains("terms") || !doc["terms"].is_array())
    throw ParseError("hamiltonian file: missing array field 'terms'");
  int idx = 0;
  for (const auto& term : doc["terms"]) {
    const std::string where = "term " + std::to_string(idx);
    if (!term.contains("coeff") || !term["coeff"].is_array() || term["coeff"].size() != 2)
      throw ParseError("hamiltonian file: " + where + ": 'coeff' must be [re, im]");
    const double re = term["coeff"][0].get<double>();
    const double im = term["coeff"][1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ParseError("hamiltonian file: " + where + ": non-finite coefficient");
    if (!term.contains("ops") || !term["ops"].is_string())
      throw ParseError("hamiltonian file: " + where + ": 'ops' must be a string");
    PauliString p(n);
    try {
      p = PauliString::parse(n, term["ops"].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError("hamiltonian file: " + where + ": " + e.what());
    }
    h.add(Complex(re, im), p);
    ++idx;
  }
  if (doc.contains("hermitian") && doc["hermitian"].is_boolean()) {
    if (doc["hermitian"].get<bool>() && !h.hermitian())
      throw ParseError(
          "hamiltonian file: declared hermitian but coefficients have "
          "imaginary parts");
  }
  return h;
}

PauliSum parse_hamiltonian_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open hamiltonian file '" + path + "'");
  return parse_hamiltonian(in);
}

std::string serialize_hamiltonian(const PauliSum& h) {
  json doc;
  doc["n_qubits"] = h.n_qubits();
  doc["hermitian"] = h.hermitian();
  doc["terms"] = json::array();
  for (const auto& t : h.terms()) {
    json term;
    term["coeff"] = {t.coeff.real(), t.coeff.imag()};
    term["ops"] = t.string.to_string();
    doc["terms"].push_back(term);
  }
  return doc.dump(2) + "\n";
}

Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  const int n = p.n_qubits();
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  // kron(m, factor): qubit 0 ends up as the most significant factor
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd f = axis_matrix(p.axis(q));
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        next.block(r * 2, c * 2, 2, 2) = m(r, c) * f;
    m = std::move(next);
  }
  (void)dim;
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliSum& h, int max_qubits) {
  const int n = h.n_qubits();
  if (n > max_qubits)
    throw GuardExceeded("dense_matrix: " + std::to_string(n) + " qubits exceeds guard " +
                        std::to_string(max_qubits));
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) m += t.coeff * dense_matrix(t.string);
  return m;
}

PauliSum build_number_operator(int n_qubits) {
  PauliSum n_op(n_qubits);
  n_op.add(Complex(0.5 * n_qubits, 0.0), PauliString(n_qubits));
  for (int q = 0; q < n_qubits; ++q) {
    PauliString z(n_qubits);
    z.set(q, PauliAxis::Z);
    n_op.add(Complex(-0.5, 0.0), z);
  }
  return n_op;
}

Eigen::VectorXcd apply_to_statevector(const PauliString& p, const Eigen::VectorXcd& v) {
  const int n = p.n_qubits();
  const Eigen::Index dim = Eigen::Index(1) << n;
  if (v.size() != dim)
    throw std::invalid_argument("statevector length does not match 2^n_qubits");
  const Complex i(0.0, 1.0);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::Index target = j;
    Complex phase(1.0, 0.0);
    for (const auto& [q, a] : p.ops()) {
      // qubit 0 is the most significant bit
      const Eigen::Index bit = Eigen::Index(1) << (n - 1 - q);
      const bool set = (j & bit) != 0;
      switch (a) {
        case PauliAxis::X:
          target ^= bit;
          break;
        case PauliAxis::Y:
          target ^= bit;
          phase *= set ? -i : i;
          break;
        case PauliAxis::Z:
          if (set) phase = -phase;
          break;
        case PauliAxis::I:
          break;
      }
    }
    out(target) += phase * v(j);
  }
  return out;
}

}  // namespace qcmps
