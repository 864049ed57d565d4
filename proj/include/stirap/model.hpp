#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stirap {

// Units: hbar = 1, times in units of the short-pulse width T, frequencies in 1/T.

using Complex = std::complex<double>;

inline constexpr int kMaxLevels = 5;

/// Complex square matrix of at most kMaxLevels rows; never heap allocates.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxLevels, kMaxLevels>;
/// Amplitude vector in the bare-state basis |1>..|n> (stored zero-based).
using State = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLevels, 1>;

/// Gaussian Rabi-frequency profile peak * exp(-((t - center) / width)^2) with a constant phase.
class PulseEnvelope {
public:
    PulseEnvelope() = default;
    PulseEnvelope(double peak, double center, double width, double phase = 0.0);

    double peak() const noexcept { return peak_; }
    double center() const noexcept { return center_; }
    double width() const noexcept { return width_; }
    double phase() const noexcept { return phase_; }

    double value(double t) const noexcept;

    /// Same shape with a different peak (used to switch a control field off).
    PulseEnvelope with_peak(double peak) const { return {peak, center_, width_, phase_}; }
    PulseEnvelope with_phase(double phase) const { return {peak_, center_, width_, phase}; }

    /// Half-width beyond which value() < fraction * peak.
    double support_radius(double fraction) const;

    bool operator==(const PulseEnvelope&) const = default;

private:
    double peak_ = 0.0;
    double center_ = 0.0;
    double width_ = 1.0;
    double phase_ = 0.0;
};

double envelope_value(const PulseEnvelope& p, double t) noexcept;

enum class SchemeKind { TwoLevel, Lambda3, M5, ExtendedLambda5 };

std::string_view to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(std::string_view name);
int dimension_of(SchemeKind kind);

/// Coupling chain |1>-|2>-...-|n> plus the single-photon detunings that fix its diagonal.
class LevelScheme {
public:
    static LevelScheme two_level(double delta);
    /// Two-photon resonance is built in: one shared single-photon detuning.
    static LevelScheme lambda3(double delta);
    static LevelScheme m5(const std::array<double, 4>& deltas);
    static LevelScheme extended_lambda5(const std::array<double, 4>& deltas);
    /// The resonant five-level configuration with delta_1 = delta_3 = delta, delta_2 = delta_4 = 0.
    static LevelScheme resonant_five(SchemeKind kind, double delta);
    static LevelScheme make(SchemeKind kind, std::span<const double> single_photon_detunings);

    SchemeKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dimension_of(kind_); }
    int couplings() const noexcept { return dimension() - 1; }
    const std::vector<double>& single_photon_detunings() const noexcept { return deltas_; }

    /// Diagonal of the Hamiltonian: (delta_0 = 0, delta_1, ...) truncated to dimension().
    std::vector<double> ladder() const;

    bool is_five_level() const noexcept { return dimension() == 5; }

private:
    LevelScheme(SchemeKind kind, std::vector<double> deltas);

    SchemeKind kind_ = SchemeKind::Lambda3;
    std::vector<double> deltas_;
};

/// Multi-photon detuning ladder (delta_0..delta_4) of a five-level scheme.
std::array<double, 5> multiphoton_detunings(const LevelScheme& scheme);
std::array<double, 5> multiphoton_detunings(SchemeKind kind, const std::array<double, 4>& single_photon);

/// True when delta_2 = delta_4 = 0 and delta_1 = delta_3 (relative tolerance on the ladder scale).
bool two_photon_resonant(const LevelScheme& scheme, double rel_tol = 1e-12);

enum class PulseOrder { Unspecified, StokesFirst };

/// Envelopes indexed by transition k -> k+1 (zero-based). With tie_1_4 set, the fourth
/// transition is driven by the same envelope as the first.
class PulseSet {
public:
    PulseSet() = default;

    static PulseSet two_level(const PulseEnvelope& omega1);
    static PulseSet lambda3(const PulseEnvelope& pump, const PulseEnvelope& stokes);
    static PulseSet five(const PulseEnvelope& omega1, const PulseEnvelope& omega2, const PulseEnvelope& omega3,
                         const PulseEnvelope& omega4);
    static PulseSet five_tied(const PulseEnvelope& omega1, const PulseEnvelope& omega2, const PulseEnvelope& omega3);

    int couplings() const noexcept;
    bool tie_1_4() const noexcept { return tie_1_4_; }
    PulseOrder order() const noexcept { return order_; }

    /// Envelope driving transition k (zero-based, k < couplings()).
    const PulseEnvelope& at(int k) const;

    /// The distinct envelopes actually stored (3 for a tied five-level set).
    const std::vector<PulseEnvelope>& stored() const noexcept { return envelopes_; }

    /// Rabi frequencies of every transition at time t.
    void rabi_at(double t, std::span<double> out) const;

    /// Copy with every phase shifted by the same constant.
    PulseSet with_common_phase(double phase) const;

    /// Earliest start / latest end where any nonzero envelope exceeds fraction * peak.
    std::optional<std::pair<double, double>> support(double fraction) const;

private:
    friend PulseSet sp_pair(const PulseEnvelope& stokes, const PulseEnvelope& pump);

    std::vector<PulseEnvelope> envelopes_;
    bool tie_1_4_ = false;
    PulseOrder order_ = PulseOrder::Unspecified;
};

/// "Stokes preceding pump" pair for the Lambda system: Omega_1 = pump (|1>-|2>), Omega_2 = Stokes (|2>-|3>).
PulseSet sp_pair(const PulseEnvelope& stokes, const PulseEnvelope& pump);

struct HamiltonianSample {
    Matrix matrix;
    double time = 0.0;
};

enum class ResonancePolicy { Unchecked, RequireTwoPhotonResonance };

/// Chain Hamiltonian with the given diagonal and couplings H[k, k+1] = -rabi[k] * exp(i phase[k]).
Matrix assemble_hamiltonian(std::span<const double> ladder, std::span<const double> rabi,
                            std::span<const double> phases);

/// In-place form of assemble_hamiltonian for inner loops; sizes are not checked.
void fill_hamiltonian(std::span<const double> ladder, std::span<const double> rabi, std::span<const double> phases,
                      Matrix& h);

HamiltonianSample build_hamiltonian(const LevelScheme& scheme, const PulseSet& pulses, double t,
                                    ResonancePolicy policy = ResonancePolicy::Unchecked);

/// Throws DimensionError if the pulse set does not fit the scheme.
void check_compatible(const LevelScheme& scheme, const PulseSet& pulses);

/// Basis state |level> (one-based level index, as in the physics notation).
State bare_state(int dimension, int level);

}  // namespace stirap
