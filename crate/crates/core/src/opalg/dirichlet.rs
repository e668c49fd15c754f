use super::OperatorAlgebra;
use crate::fdca::star_span;
use crate::matcore::{SpanBuilder, ToleranceConfig};

fn self_adjoint_span(a: &OperatorAlgebra, tol: &ToleranceConfig) -> SpanBuilder {
    let mut span = SpanBuilder::new(tol.eps_norm);
    for b in a.basis() {
        span.try_push(&b.to_vec());
        span.try_push(&b.adjoint().to_vec());
    }
    span
}

/// Dimension of `A + A*`.
pub fn star_closure_dim(a: &OperatorAlgebra, tol: &ToleranceConfig) -> usize {
    self_adjoint_span(a, tol).len()
}

/// `A* A ⊆ A + A*`.
pub fn is_semi_dirichlet(a: &OperatorAlgebra, tol: &ToleranceConfig) -> bool {
    let span = self_adjoint_span(a, tol);
    a.basis().iter().all(|x| {
        let xa = x.adjoint();
        a.basis().iter().all(|y| span.contains(&xa.mul(y).to_vec()))
    })
}

/// `A + A*` is all of the C*-algebra generated by `A`.
pub fn is_dirichlet(a: &OperatorAlgebra, tol: &ToleranceConfig) -> bool {
    let generated = star_span(a.ambient(), a.generators(), tol).map(|b| b.len());
    generated.is_ok_and(|d| d == star_closure_dim(a, tol))
}
