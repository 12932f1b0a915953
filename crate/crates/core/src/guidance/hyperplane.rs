use super::{GuidanceError, Trajectory};
use crate::spacetime::{minkowski_dot, FourVector};

/// Parameter `λ*` where `(x − z(λ*))·ż(λ*) = 0`, i.e. where the trajectory
/// pierces the hyperplane through `x` orthogonal to its own velocity.
///
/// When several roots exist the one whose point is closest to `x` in the
/// euclidean sense is returned.
pub fn find_hyperplane_lambda(traj: &Trajectory, x: FourVector) -> Result<f64, GuidanceError> {
    let roots = traj.roots_of(|p| minkowski_dot(x - p.z, p.tangent));
    roots
        .into_iter()
        .min_by(|a, b| (x - a.z).euclidean_norm().total_cmp(&(x - b.z).euclidean_norm()))
        .map(|p| p.lambda)
        .ok_or(GuidanceError::NoHyperplaneRoot)
}
