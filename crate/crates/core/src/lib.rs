//! Numerical laboratory for quantum walks and quantum cellular automata of
//! free QED.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: dense complex linear algebra (Kronecker products, Hermitian
//!   and unitary eigendecompositions, exponentials of Hermitian generators).
//! - [`internal_space`]: Dirac and spin-1 internal spaces with their shift
//!   projectors and the equal-norm verifier.
//! - [`momentum`]: momentum-block walk unitaries, dispersion, polarization
//!   vectors, the Maxwell residual and the bosonic 3D QCA matrices.
//! - [`qca1d`]: state-vector simulation of the 1D fermionic and bosonic QCAs,
//!   their interaction unitary and time-reversal operator.
//! - [`toeplitz`]: the symbol `f(n)`, the coupling matrices `D` and `D̄`, the
//!   transform `f̃(k)` and the negative-energy coupling functional.
//! - [`bigreal`] and [`highprec`]: arbitrary-precision reals and a symmetric
//!   eigensolver for the exponentially small eigenvalues of `D̄`.
//! - [`fit`]: exponential-decay and Gaussian fits.
//! - [`cli`]: the experiment runner behind the `qca-lab` binary.

pub mod bigreal;
pub mod cli;
pub mod fit;
pub mod highprec;
pub mod internal_space;
pub mod matrix;
pub mod momentum;
pub mod qca1d;
pub mod toeplitz;
