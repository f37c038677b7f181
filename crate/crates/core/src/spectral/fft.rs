use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

// Shared by every worker; plans are immutable once built.
static PLANS: OnceLock<RwLock<HashMap<usize, Arc<Plans>>>> = OnceLock::new();

fn plans(n: usize) -> Arc<Plans> {
    let cache = PLANS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("fft plan cache poisoned").get(&n) {
        return Arc::clone(p);
    }
    let mut guard = cache.write().expect("fft plan cache poisoned");
    Arc::clone(guard.entry(n).or_insert_with(|| {
        let mut planner = FftPlanner::new();
        Arc::new(Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }))
}

/// Unnormalized in-place d-dimensional transform, one axis at a time.
pub(crate) fn transform(grid: &TorusGrid, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let p = plans(n);
    let fft = match dir {
        Direction::Forward => &p.forward,
        Direction::Inverse => &p.inverse,
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let d = grid.dim();

    // Last axis is contiguous.
    for line in data.chunks_exact_mut(n) {
        fft.process_with_scratch(line, &mut scratch);
    }

    let mut buf = vec![Complex64::default(); n];
    for axis in 0..d - 1 {
        let stride = n.pow((d - 1 - axis) as u32);
        let outer = n.pow(axis as u32);
        for o in 0..outer {
            let block = o * n * stride;
            for inner in 0..stride {
                let base = block + inner;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[base + j * stride];
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (j, b) in buf.iter().enumerate() {
                    data[base + j * stride] = *b;
                }
            }
        }
    }
}
