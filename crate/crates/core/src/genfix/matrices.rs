//! Random projection matrices drawn as Gram matrices of local sections.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::genfix::presheaf::{etale_from_presheaf, random_presheaf, Presheaf};
use crate::hilbert::inner_from_support;
use crate::lattice::{downset_frame, Poset};
use crate::matrix::{is_projection_matrix, module_from_matrix, Matrix, ProjectionMatrix};

/// Regeneration attempts before falling back to the full section set.
pub const MATRIX_ATTEMPTS: usize = 50;

/// Draws an étale locale over `↓poset`, picks `k` local sections with
/// repetition and returns their Gram matrix, provided it is a projection
/// matrix whose module is spanned by the picked columns.
pub fn random_projection_matrix(
    seed: u64,
    poset: &Poset,
    k: usize,
    max_fiber: usize,
    max_elements: usize,
) -> Result<ProjectionMatrix> {
    let base = Arc::new(downset_frame(poset)?);
    if k == 0 {
        return ProjectionMatrix::new(Matrix::identity(base, 0), vec![]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..MATRIX_ATTEMPTS {
        let f = random_presheaf(rng.gen(), poset, max_fiber);
        let Ok(inst) = etale_from_presheaf(base.clone(), &f, max_elements) else { continue };
        let h = inner_from_support(&inst.locale)?;
        let sections = inst.locale.local_sections()?.to_vec();
        let picks: Vec<usize> = (0..k).map(|_| sections[rng.gen_range(0..sections.len())]).collect();
        let m = Matrix::from_fn(base.clone(), k, k, |s, t| h.ip(picks[s], picks[t]));
        if is_projection_matrix(&m).passed() {
            let names = picks.iter().map(|&s| h.module().carrier().label(s).to_string()).collect();
            let pm = ProjectionMatrix::new(m, names)?;
            if module_from_matrix(&pm).is_ok() {
                return Ok(pm);
            }
        }
        last = Some((h, sections));
    }
    let (h, sections) = match last {
        Some(v) => v,
        None => {
            let inst = etale_from_presheaf(base.clone(), &Presheaf::terminal(poset.clone()), max_elements)?;
            let h = inner_from_support(&inst.locale)?;
            let s = inst.locale.local_sections()?.to_vec();
            (h, s)
        }
    };
    let n = sections.len();
    let m = Matrix::from_fn(base, n, n, |s, t| h.ip(sections[s], sections[t]));
    let names = sections.iter().map(|&s| h.module().carrier().label(s).to_string()).collect();
    ProjectionMatrix::new(m, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfix::presheaf::random_poset;

    #[test]
    fn empty_matrix_gives_trivial_module() {
        let pm = random_projection_matrix(0, &Poset::chain(2), 0, 2, 8).unwrap();
        assert!(pm.is_empty());
        assert_eq!(module_from_matrix(&pm).unwrap().len(), 1);
    }

    #[test]
    fn outputs_are_projections_and_reproducible() {
        for seed in 0..30 {
            let p = random_poset(seed, 3).unwrap();
            let k = (seed % 4) as usize + 1;
            let a = random_projection_matrix(seed, &p, k, 2, 8).unwrap();
            assert!(is_projection_matrix(a.matrix()).passed());
            assert_eq!(a, random_projection_matrix(seed, &p, k, 2, 8).unwrap());
        }
    }
}
