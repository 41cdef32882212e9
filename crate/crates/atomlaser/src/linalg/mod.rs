//! Dense and tridiagonal linear algebra used by the solvers, generic over the scalar.

mod cmat;
mod symeig;
mod tridiag;

pub use cmat::{expm, CMat, LuError};
pub use symeig::{sym_eigen, SymEigen};
pub use tridiag::{solve_tridiag, tridiag_eigen_range, TridiagEigen, TridiagLu};
