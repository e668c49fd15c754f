use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Cover;
use crate::error::Result;
use crate::fdca::{BlockElement, BlockShape, StarHomData};
use crate::matcore::{psd_null_space, random_complex, unitary_polar, ComplexMatrix, ToleranceConfig, C64};

/// Upper bound on multiplicity vectors tried per target block.
const MAX_CANDIDATES: usize = 1000;

/// Multiplicity vectors `mu` with `sum mu_j sizes_j = total`, fewest copies first.
fn multiplicity_vectors(sizes: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn rec(sizes: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if out.len() > MAX_CANDIDATES {
            return;
        }
        match sizes.split_first() {
            None => {
                if left == 0 {
                    out.push(cur.clone());
                }
            }
            Some((&s, rest)) => {
                for m in 0..=left / s {
                    cur.push(m);
                    rec(rest, left - m * s, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(sizes, total, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let (sa, sb): (usize, usize) = (a.iter().sum(), b.iter().sum());
        sa.cmp(&sb).then_with(|| b.cmp(a))
    });
    out.truncate(MAX_CANDIDATES);
    out
}

fn stacked(mu: &[usize], x: &BlockElement) -> DMatrix<C64> {
    let mut parts = Vec::new();
    for (j, &m) in mu.iter().enumerate() {
        for _ in 0..m {
            parts.push(x.block(j));
        }
    }
    ComplexMatrix::direct_sum(&parts).into_dmatrix()
}

/// Unitary `U` with `U D_g U* = b_g` for all pairs, if one exists.
fn fit_conjugator(pairs: &[(DMatrix<C64>, DMatrix<C64>)], tol: &ToleranceConfig, rng: &mut ChaCha8Rng) -> Option<DMatrix<C64>> {
    let t = pairs[0].0.nrows();
    let id = DMatrix::<C64>::identity(t, t);
    let mut normal = DMatrix::<C64>::zeros(t * t, t * t);
    for (d, b) in pairs {
        // vec(T D - b T) = (D^T ⊗ I - I ⊗ b) vec(T); adjoints give the second equation
        for (dd, bb) in [(d.clone(), b.clone()), (d.adjoint(), b.adjoint())] {
            let l = dd.transpose().kronecker(&id) - id.kronecker(&bb);
            normal += l.adjoint() * l;
        }
    }
    let null = psd_null_space(&normal, 1e-10);
    if null.is_empty() {
        return None;
    }
    for _ in 0..3 {
        let mut v = vec![C64::new(0.0, 0.0); t * t];
        for n in &null {
            let c = random_complex(rng);
            for (a, b) in v.iter_mut().zip(n) {
                *a += c * b;
            }
        }
        let Some(u) = unitary_polar(&DMatrix::from_column_slice(t, t, &v), 1e-6) else {
            continue;
        };
        let ok = pairs.iter().all(|(d, b)| {
            let r = &u * d * u.adjoint() - b;
            let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
            r.iter().all(|z| z.norm() <= tol.eps_eq * scale)
        });
        if ok {
            return Some(u);
        }
    }
    None
}

/// The *-homomorphism `h: from.target -> to.target` with
/// `h ∘ from = to`, when one exists.
pub fn find_morphism(from: &Cover, to: &Cover, tol: &ToleranceConfig) -> Result<Option<StarHomData>> {
    let h = fit_star_hom(from.target(), from.generator_images(), to.target(), to.generator_images(), tol)?;
    Ok(h.filter(|h| from.intertwines(h, to, tol)))
}

/// Searches for a unital *-homomorphism `h: source -> target` with
/// `h(from[g]) = to[g]` for every `g`.
pub fn fit_star_hom(
    source: &BlockShape,
    from: &[BlockElement],
    target: &BlockShape,
    to: &[BlockElement],
    tol: &ToleranceConfig,
) -> Result<Option<StarHomData>> {
    let mut rng = ChaCha8Rng::seed_from_u64(tol.rng_seed ^ 0x6d6f_7270);
    let mut multiplicity = Vec::with_capacity(target.num_blocks());
    let mut conjugators = Vec::with_capacity(target.num_blocks());
    for i in 0..target.num_blocks() {
        let mut found = None;
        for mu in multiplicity_vectors(source.sizes(), target.size(i)) {
            let pairs: Vec<(DMatrix<C64>, DMatrix<C64>)> = from
                .iter()
                .zip(to)
                .map(|(x, y)| (stacked(&mu, x), y.block(i).as_dmatrix().clone()))
                .collect();
            if let Some(u) = fit_conjugator(&pairs, tol, &mut rng) {
                found = Some((mu, u));
                break;
            }
        }
        let Some((mu, u)) = found else {
            return Ok(None);
        };
        multiplicity.push(mu);
        conjugators.push(ComplexMatrix::new(u)?);
    }
    let h = StarHomData::new(source.clone(), target.clone(), multiplicity, conjugators, tol)?;
    let ok = from.iter().zip(to).all(|(x, y)| {
        h.apply(x)
            .is_ok_and(|hx| hx.max_abs_diff(y) <= tol.eps_eq * y.max_abs().max(1.0))
    });
    Ok(ok.then_some(h))
}
