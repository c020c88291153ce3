//! Amplitude-group kernels.
//!
//! A gate acting on `k` qubits partitions the state into `2^(n-k)` disjoint
//! groups of `2^k` amplitudes. Each group is visited exactly once, and the
//! update of a group depends only on that group, so any split of the group
//! range across workers yields bit-identical results.

use num_complex::Complex64;
use rayon::prelude::*;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const MIN_GROUPS_PER_TASK: usize = 1 << 11;

#[derive(Clone, Copy)]
struct SendPtr(*mut Complex64);

// SAFETY: workers only dereference indices of their own groups, and groups are
// disjoint, so no two workers ever touch the same amplitude.
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

impl SendPtr {
    fn get(self) -> *mut Complex64 {
        self.0
    }
}

/// Operation on one group: an optional swap of two local indices followed by
/// 2×2 unitaries on selected local bits, in order.
#[derive(Clone, Debug, Default)]
pub(crate) struct LocalOp {
    pub swap: Option<(usize, usize)>,
    pub rotations: arrayvec::ArrayVec<(usize, Mat2), 3>,
}

/// Spreads the bits of `g` around zero bits at the (ascending) `positions`.
#[inline]
fn deposit(mut g: usize, positions: &[usize]) -> usize {
    for &p in positions {
        let low = g & ((1 << p) - 1);
        g = ((g >> p) << (p + 1)) | low;
    }
    g
}

/// Applies `op` to every group spanned by `qubits` (ascending, distinct).
pub(crate) fn apply_local(amps: &mut [Complex64], qubits: &[usize], op: &LocalOp) {
    debug_assert!(qubits.windows(2).all(|w| w[0] < w[1]));
    let k = qubits.len();
    let groups = amps.len() >> k;
    let mut offsets = [0usize; 8];
    for (l, off) in offsets.iter_mut().enumerate().take(1 << k) {
        *off = qubits.iter().enumerate().filter(|(b, _)| l >> b & 1 == 1).map(|(_, &q)| 1 << q).sum();
    }
    let ptr = SendPtr(amps.as_mut_ptr());

    if op.rotations.is_empty() {
        let Some((a, b)) = op.swap else { return };
        let (oa, ob) = (offsets[a], offsets[b]);
        (0..groups).into_par_iter().with_min_len(MIN_GROUPS_PER_TASK).for_each(move |g| {
            let base = deposit(g, qubits);
            // SAFETY: base + offset < amps.len() and the group is owned by this call.
            unsafe {
                std::ptr::swap(ptr.get().add(base + oa), ptr.get().add(base + ob));
            }
        });
        return;
    }

    match k {
        1 => apply_groups::<2>(ptr, groups, qubits, &offsets, op),
        2 => apply_groups::<4>(ptr, groups, qubits, &offsets, op),
        3 => apply_groups::<8>(ptr, groups, qubits, &offsets, op),
        _ => unreachable!("gates act on one to three qubits"),
    }
}

fn apply_groups<const SIZE: usize>(ptr: SendPtr, groups: usize, qubits: &[usize], offsets: &[usize; 8], op: &LocalOp) {
    let offsets: [usize; SIZE] = std::array::from_fn(|l| offsets[l]);
    (0..groups).into_par_iter().with_min_len(MIN_GROUPS_PER_TASK).for_each(move |g| {
        let base = deposit(g, qubits);
        // SAFETY: base + offset < amps.len(), and the group belongs to this task only.
        let mut buf: [Complex64; SIZE] = std::array::from_fn(|l| unsafe { *ptr.get().add(base + offsets[l]) });
        if let Some((a, b)) = op.swap {
            buf.swap(a, b);
        }
        for &(bit, m) in &op.rotations {
            let stride = 1 << bit;
            for l in 0..SIZE {
                if l & stride == 0 {
                    let (u, v) = (buf[l], buf[l | stride]);
                    buf[l] = m[0][0] * u + m[0][1] * v;
                    buf[l | stride] = m[1][0] * u + m[1][1] * v;
                }
            }
        }
        for l in 0..SIZE {
            unsafe { *ptr.get().add(base + offsets[l]) = buf[l] };
        }
    });
}

/// `exp(-i·θ·(n̂·σ)/2)` for a unit axis `n̂`.
pub(crate) fn rotation_matrix(axis: [f64; 3], angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    [
        [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
        [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
    ]
}
