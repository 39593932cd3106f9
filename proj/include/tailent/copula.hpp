#pragma once

// Model families used throughout: independence, comonotone, Gaussian,
// Student t and Gumbel copulas, plus a Gaussian mixture on the raw scale.
// Provides validation, seeded sampling and exact cdf evaluation for the
// families that have a closed form.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tailent {

struct Independence {
  int dim;
};

struct Comonotone {
  int dim;
};

struct GaussianCopula {
  Eigen::MatrixXd rho;  // correlation matrix
};

struct StudentCopula {
  double nu;            // degrees of freedom, > 2
  Eigen::MatrixXd rho;  // correlation matrix
};

struct GumbelCopula {
  double xi;  // dependence parameter, >= 1 (1 = independence)
  int dim;
};

// Mixture of multivariate normals; samples live on the raw scale and are
// meant to be pushed through to_pseudo_observations by the caller.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

using CopulaSpec = std::variant<Independence, Comonotone, GaussianCopula,
                                StudentCopula, GumbelCopula, GaussianMixture>;

int dimension(const CopulaSpec& spec);
std::string family_name(const CopulaSpec& spec);

// Checks the family-specific invariants: correlation matrices symmetric with
// unit diagonal and positive definite, Student nu > 2, Gumbel xi >= 1,
// mixture weights summing to 1 with positive-definite covariances.
void validate(const CopulaSpec& spec);

// True for the families whose cdf has a closed form (independence,
// comonotone, Gumbel); only those can be used in exact-cell computations.
bool has_closed_form_cdf(const CopulaSpec& spec);

// Exact copula cdf for the closed-form families, u componentwise in [0,1].
double cdf(const CopulaSpec& spec, const std::vector<double>& u);

enum class SampleSpace { kCopulaScale, kRawScale };

struct SimBatch {
  Eigen::MatrixXd values;
  std::uint64_t seed;
  CopulaSpec spec;
  SampleSpace space;
};

// Draws n iid rows from the family.  Deterministic given (spec, n, seed);
// bit-identical across runs and thread counts.  Copula families emit the
// uniform copula scale, the Gaussian mixture emits the raw scale.
SimBatch sample(const CopulaSpec& spec, long n, std::uint64_t seed);

}  // namespace tailent
