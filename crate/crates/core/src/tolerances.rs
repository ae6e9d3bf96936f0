//! Numerical thresholds used across the crate, collected here so every
//! cutoff is auditable in one place. Two tiers recur: identities that
//! involve only bounded algebra are held to 1e-12, while anything that
//! passes through an eigendecomposition or a search is held to 1e-10.

/// Algebraic identities evaluated without a decomposition step.
pub const ALGEBRAIC: f64 = 1e-12;

/// Quantities derived through an eigendecomposition or a search.
pub const DERIVED: f64 = 1e-10;

/// Max entrywise deviation allowed in a Hermiticity check.
pub const HERMITICITY: f64 = 1e-12;

/// Max entrywise deviation of U U-dagger from the identity.
pub const UNITARITY: f64 = 1e-10;

/// Deviation of a state vector's Euclidean norm from 1.
pub const STATE_NORM: f64 = 1e-12;

/// Imaginary residue tolerated in a Hermitian expectation value.
pub const EXPECTATION_IMAG: f64 = 1e-12;

/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

/// Full cyclic sweeps allowed before the eigensolver reports failure.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Magnitude ties closer than this break to the lowest index when
/// fixing an eigenvector's phase.
pub const PHASE_TIE: f64 = 1e-12;

/// Smallest spectral gap accepted when isolating a unique ground state.
pub const SPECTRAL_GAP_MIN: f64 = 1e-8;

/// Branch probabilities below this cannot be renormalized reliably.
pub const BRANCH_PROB_MIN: f64 = 1e-14;

/// Relative tolerance for closed-form versus oracle agreement.
pub const AUDIT_REL: f64 = 1e-9;

/// Residual above which a fitted energy curve is flagged as holding
/// more than one frequency.
pub const CURVE_MULTI_FREQUENCY: f64 = 1e-6;

/// Hard bound on disagreement between the harmonic reconstruction and
/// the golden-section search before the optimizer reports failure.
pub const OPTIMIZER_AGREEMENT: f64 = 1e-8;

/// Golden-section iteration budget; saturates f64 long before 200.
pub const GOLDEN_ITERATIONS: usize = 200;

/// Interval width target when refining the sweep maximizer in x.
pub const SWEEP_REFINE_X: f64 = 1e-10;

/// Default scale-separation factor operationalizing "much less than".
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Published dimensionless ceiling on extracted energy per unit k.
pub const EB_OVER_K_BOUND: f64 = 0.13;
