// Copyright 2026 The dressq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRESSQ_MODEL_H
#define DRESSQ_MODEL_H

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dressq {

using cplx = std::complex<double>;

inline constexpr int kTransmonLevels = 7;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Converts a frequency quoted as f = ω/2π in GHz into angular rad/ns.
constexpr double angular(double ghz) { return kTwoPi * ghz; }

/// Physical parameters of the driven resonator-transmon system.
///
/// Frequencies are stored as ω/2π in GHz, the way they are quoted in configs
/// and plots. Every computation converts to rad/ns through the accessor
/// methods; time is always in ns.
struct SystemParams {
    double f_r = 6.0;    ///< bare resonator frequency
    double f_q = 5.0;    ///< qubit frequency ω_10
    double eta = 0.2;    ///< anharmonicity ω_10 - ω_21
    double g = 0.1;      ///< coupling between |0,1> and |1,0>
    double f_d = 6.0;    ///< drive (rotating frame) frequency
    int n_res = 300;     ///< resonator truncation N
    int n_tr = kTransmonLevels;
    double e0 = 0.0;     ///< transmon ground-energy offset

    double omega_r() const { return angular(f_r); }
    double omega_q() const { return angular(f_q); }
    double omega_d() const { return angular(f_d); }
    double eta_rad() const { return angular(eta); }
    double g_rad() const { return angular(g); }
    double e0_rad() const { return angular(e0); }
    double detuning() const { return angular(f_r - f_q); }
    int dim() const { return n_res * kTransmonLevels; }

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

/// Resonator 6 GHz, qubit 5 GHz, η 200 MHz, g 100 MHz; the drive frequency is
/// left at the bare resonator frequency and is normally retuned by the caller.
SystemParams default_params();

/// Product-basis label |n,k> with flat row index n*7 + k.
struct BareIndex {
    int n = 0;
    int k = 0;

    constexpr int flat() const { return n * kTransmonLevels + k; }
    static constexpr BareIndex from_flat(int flat) {
        return BareIndex{flat / kTransmonLevels, flat % kTransmonLevels};
    }
    friend constexpr bool operator==(BareIndex, BareIndex) = default;
};

constexpr int flat_index(int n, int k) { return n * kTransmonLevels + k; }

/// Complex drive envelope ε(t). Amplitudes are ε/2π in GHz.
class DriveEnvelope {
   public:
    enum class Kind { kSuddenConstant, kLinearRamp, kTabulated };

    struct Sample {
        double t_ns;
        cplx eps;
    };

    static DriveEnvelope sudden(cplx eps);
    static DriveEnvelope linear_ramp(cplx eps, double ramp_ns);
    /// Samples must be sorted by strictly increasing time. Linear interpolation
    /// between samples, held constant outside the table.
    static DriveEnvelope tabulated(std::vector<Sample> table);

    Kind kind() const { return kind_; }
    cplx amplitude() const { return eps_; }
    double ramp_ns() const { return ramp_ns_; }
    const std::vector<Sample>& table() const { return table_; }

    /// ε(t)/2π in GHz.
    cplx at(double t_ns) const;
    /// ε(t) in rad/ns.
    cplx angular_at(double t_ns) const { return kTwoPi * at(t_ns); }
    /// Largest |ε(t)|/2π over the whole envelope.
    double peak() const;

    /// Same shape with the amplitude multiplied by `factor`.
    DriveEnvelope scaled(cplx factor) const;

   private:
    Kind kind_ = Kind::kSuddenConstant;
    cplx eps_ = 0.0;
    double ramp_ns_ = 0.0;
    std::vector<Sample> table_;
};

/// Transmon energies E_k (rad/ns, lab frame) for k = 0..6 in the quartic
/// anharmonic approximation.
std::array<double, kTransmonLevels> bare_energies(const SystemParams& params);

/// Drive-free rotating-frame Hamiltonian in banded storage.
///
/// In flat indexing the Jaynes-Cummings hopping |n,k> -> |n-1,k+1> moves the
/// row index by -6, so H0 only has the main diagonal and the ±6 bands.
class RotatingHamiltonian {
   public:
    RotatingHamiltonian(int n_res, std::vector<double> diag, std::vector<double> hop);

    int n_res() const { return n_res_; }
    int dim() const { return static_cast<int>(diag_.size()); }
    std::span<const double> diag() const { return diag_; }
    /// hop()[i] = <i-6|H0|i>, zero where |i> has n = 0 or k = 6.
    std::span<const double> hop() const { return hop_; }

    double element(int row, int col) const;
    Eigen::MatrixXd dense() const;
    /// Largest absolute row sum; an upper bound on the spectral radius.
    double norm_bound() const;

   private:
    int n_res_;
    std::vector<double> diag_;
    std::vector<double> hop_;
};

/// Resonator raising operator D = Σ √(n+1)|n+1,k><n,k| (band +7) and its
/// adjoint. The full drive term is ε(t) D + ε*(t) D†.
class DriveOperator {
   public:
    explicit DriveOperator(int n_res);

    int n_res() const { return n_res_; }
    int dim() const { return n_res_ * kTransmonLevels; }
    /// raise()[i] = <i+7|D|i>.
    std::span<const double> raise() const { return raise_; }

    double element(int row, int col) const;
    double adjoint_element(int row, int col) const { return element(col, row); }
    Eigen::MatrixXd dense() const;
    Eigen::MatrixXd dense_adjoint() const { return dense().transpose(); }

   private:
    int n_res_;
    std::vector<double> raise_;
};

RotatingHamiltonian build_h0(const SystemParams& params);
DriveOperator build_drive_op(const SystemParams& params);

/// out = (H0 + ε D + ε* D†) in, ε in rad/ns.
void apply_hamiltonian(const RotatingHamiltonian& h0, const DriveOperator& drive, cplx eps,
                       std::span<const cplx> in, std::span<cplx> out);

/// Dense H0 + ε D + ε* D† for small truncations.
Eigen::MatrixXcd dense_hamiltonian(const RotatingHamiltonian& h0, const DriveOperator& drive, cplx eps);

}  // namespace dressq

#endif  // DRESSQ_MODEL_H
