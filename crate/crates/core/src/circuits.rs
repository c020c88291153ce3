//! Reversible circuits for one map step and for velocity inversion.
//!
//! Both are built from modular ripple-carry additions. Carries are computed
//! into the workspace register with Toffoli gates, sum bits are written with
//! CNOT/NOT, and the carries are uncomputed so the workspace ends in `|0⟩`.
//! Classical constants are folded in as per-bit addends: a constant one bit
//! turns into NOT/CNOT patterns rather than a separate addition.

use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::lattice::PhaseSpaceConfig;
use crate::qsv::{Gate, NoiseModel, QuantumState, RegisterLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub not: usize,
    pub cnot: usize,
    pub toffoli: usize,
    /// Σ over gates of the number of qubits each gate touches.
    pub touched: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.not + self.cnot + self.toffoli
    }

    fn add(&mut self, gate: &Gate, sign: isize) {
        let slot = match gate {
            Gate::Not(_) => &mut self.not,
            Gate::Cnot { .. } => &mut self.cnot,
            Gate::Toffoli { .. } => &mut self.toffoli,
            Gate::Rot { .. } => unreachable!("circuits hold classical gates only"),
        };
        *slot = slot.wrapping_add_signed(sign);
        self.touched = self.touched.wrapping_add_signed(sign * gate.touched().len() as isize);
    }
}

/// Ordered list of NOT/CNOT/Toffoli gates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    gates: Vec<Gate>,
    counts: GateCounts,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a gate. An immediate repeat of the previous gate cancels it,
    /// since every classical gate is its own inverse.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if !gate.is_classical() {
            return domain("circuits accept NOT, CNOT and Toffoli gates only");
        }
        if self.gates.last() == Some(&gate) {
            self.gates.pop();
            self.counts.add(&gate, -1);
        } else {
            self.counts.add(&gate, 1);
            self.gates.push(gate);
        }
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) {
        for g in &other.gates {
            self.push(*g).expect("classical gates");
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn counts(&self) -> GateCounts {
        self.counts
    }

    pub fn touched_qubit_total(&self) -> usize {
        self.counts.touched
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The gate sequence reversed; the inverse permutation.
    pub fn inverse(&self) -> Circuit {
        let mut c = Circuit::new();
        for g in self.gates.iter().rev() {
            c.push(*g).expect("classical gates");
        }
        c
    }

    /// Drops one gate; used to build deliberately broken circuits for negative
    /// controls.
    pub fn remove_gate(&mut self, index: usize) -> Option<Gate> {
        (index < self.gates.len()).then(|| {
            let g = self.gates.remove(index);
            self.counts.add(&g, -1);
            g
        })
    }

    pub fn validate(&self, total_qubits: usize) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(total_qubits))
    }

    /// Image of a basis index under the whole circuit.
    pub fn apply_to_basis(&self, index: usize) -> usize {
        self.gates.iter().fold(index, |idx, g| g.apply_to_basis(idx))
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        self.gates.iter().try_for_each(|g| state.apply(g))
    }

    pub fn apply_noisy(&self, state: &mut QuantumState, noise: &mut NoiseModel) -> Result<()> {
        self.gates.iter().try_for_each(|g| state.apply_noisy(g, noise))
    }

    /// One gate per line: `NOT t`, `CNOT c t`, `TOFFOLI c1 c2 t`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let _ = match *g {
                Gate::Not(t) => writeln!(out, "NOT {t}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
                Gate::Toffoli { controls: [a, b], target } => writeln!(out, "TOFFOLI {a} {b} {target}"),
                Gate::Rot { .. } => unreachable!(),
            };
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Circuit::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Domain(format!("line {}: {msg}: {line:?}", n + 1));
            let mut parts = line.split_whitespace();
            let kind = parts.next().ok_or_else(|| bad("empty"))?;
            let qs: Vec<usize> = parts.map(|p| p.parse().map_err(|_| bad("bad qubit index"))).collect::<Result<_>>()?;
            let gate = match (kind, qs.as_slice()) {
                ("NOT", &[t]) => Gate::not(t),
                ("CNOT", &[a, t]) => Gate::cnot(a, t),
                ("TOFFOLI", &[a, b, t]) => Gate::toffoli(a, b, t),
                _ => return Err(bad("unknown gate or wrong arity")),
            };
            // keep the text's sequence verbatim
            c.counts.add(&gate, 1);
            c.gates.push(gate);
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bit {
    Zero,
    One,
    Qubit(usize),
}

/// Ripple-carry addition of per-bit `addends` into `dst` modulo `2^m`.
/// `carries[k]` holds the carry into bit `k + 1`.
fn ripple(circ: &mut Circuit, addends: &[Bit], dst: &[usize], carries: &[usize]) -> Result<()> {
    use Bit::*;
    let m = dst.len();
    // carry into each bit; a known-zero carry costs no gates
    let mut carry_in = vec![Zero; m];
    for k in 0..m.saturating_sub(1) {
        let (a, b, c, out) = (addends[k], dst[k], carry_in[k], carries[k]);
        match (a, c) {
            (Zero, Zero) => continue,
            (Zero, Qubit(c)) => circ.push(Gate::toffoli(b, c, out))?,
            (One, Zero) => circ.push(Gate::cnot(b, out))?,
            (One, Qubit(c)) => {
                circ.push(Gate::cnot(b, out))?;
                circ.push(Gate::cnot(c, out))?;
                circ.push(Gate::toffoli(b, c, out))?;
            }
            (Qubit(a), Zero) => circ.push(Gate::toffoli(a, b, out))?,
            (Qubit(a), Qubit(c)) => {
                circ.push(Gate::toffoli(a, b, out))?;
                circ.push(Gate::cnot(a, b))?;
                circ.push(Gate::toffoli(c, b, out))?;
            }
            (_, One) => unreachable!(),
        }
        carry_in[k + 1] = Qubit(out);
    }
    // top bit: sum only, the outgoing carry is dropped
    let top = m - 1;
    match addends[top] {
        Qubit(a) => circ.push(Gate::cnot(a, dst[top]))?,
        One => circ.push(Gate::not(dst[top]))?,
        Zero => {}
    }
    if let Qubit(c) = carry_in[top] {
        circ.push(Gate::cnot(c, dst[top]))?;
    }
    // uncompute carries from the top down, writing each sum bit behind them
    for k in (0..m.saturating_sub(1)).rev() {
        let (a, b, c, out) = (addends[k], dst[k], carry_in[k], carries[k]);
        match (a, c) {
            (Zero, Zero) => {}
            (Zero, Qubit(c)) => {
                circ.push(Gate::toffoli(b, c, out))?;
                circ.push(Gate::cnot(c, b))?;
            }
            (One, Zero) => {
                circ.push(Gate::cnot(b, out))?;
                circ.push(Gate::not(b))?;
            }
            (One, Qubit(c)) => {
                circ.push(Gate::toffoli(b, c, out))?;
                circ.push(Gate::cnot(c, out))?;
                circ.push(Gate::cnot(b, out))?;
                circ.push(Gate::not(b))?;
                circ.push(Gate::cnot(c, b))?;
            }
            (Qubit(a), Zero) => {
                circ.push(Gate::toffoli(a, b, out))?;
                circ.push(Gate::cnot(a, b))?;
            }
            (Qubit(a), Qubit(c)) => {
                // here b holds a⊕b and out holds maj(a, b, c)
                circ.push(Gate::toffoli(c, b, out))?;
                circ.push(Gate::toffoli(a, b, out))?;
                circ.push(Gate::cnot(a, out))?;
                circ.push(Gate::cnot(c, b))?;
            }
            (_, One) => unreachable!(),
        }
    }
    Ok(())
}

/// Circuit for `|s⟩|d⟩|0⟩ → |s⟩|(d + s + constant) mod 2^m⟩|0⟩`, where `m` is
/// the width of `dst` and registers are listed least significant bit first.
///
/// A constant equal to `-2^(w-1) mod 2^m` (with `w` the source width) is folded
/// by reading the source as a signed number: flip its top bit and sign-extend.
/// Any other non-zero constant is added in a second ripple pass.
pub fn build_adder(src: &[usize], dst: &[usize], constant: u64, workspace: &[usize]) -> Result<Circuit> {
    let (w, m) = (src.len(), dst.len());
    if m == 0 || m > 63 {
        return Err(Error::Construction(format!("destination width {m} must be in 1..=63")));
    }
    if w > m {
        return Err(Error::Construction(format!("source width {w} exceeds destination width {m}")));
    }
    if constant >= 1 << m {
        return Err(Error::Construction(format!("constant {constant} does not fit in {m} bits")));
    }
    if workspace.len() + 1 < m {
        return Err(Error::Construction(format!("adder into {m} bits needs {} workspace qubits, have {}", m - 1, workspace.len())));
    }
    let carries = &workspace[..m - 1];
    let mut all: Vec<usize> = src.iter().chain(dst).chain(carries).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Construction("source, destination and workspace qubits must be distinct".into()));
    }

    let mut circ = Circuit::new();
    let signed_fold = w >= 1 && w < m && constant == (1u64 << m) - (1u64 << (w - 1));
    if signed_fold {
        let sign = src[w - 1];
        let addends: Vec<Bit> = (0..m).map(|k| Bit::Qubit(src[k.min(w - 1)])).collect();
        circ.push(Gate::not(sign))?;
        ripple(&mut circ, &addends, dst, carries)?;
        circ.push(Gate::not(sign))?;
        return Ok(circ);
    }
    if w > 0 {
        let addends: Vec<Bit> = (0..m).map(|k| if k < w { Bit::Qubit(src[k]) } else { Bit::Zero }).collect();
        ripple(&mut circ, &addends, dst, carries)?;
    }
    if constant != 0 {
        let addends: Vec<Bit> = (0..m).map(|k| if constant >> k & 1 == 1 { Bit::One } else { Bit::Zero }).collect();
        ripple(&mut circ, &addends, dst, carries)?;
    }
    Ok(circ)
}

fn registers(cfg: PhaseSpaceConfig) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let layout = RegisterLayout::new(cfg);
    (layout.x_qubits().collect(), layout.y_qubits().collect(), layout.work_qubits().collect())
}

/// One forward map step: `y += x - N/2 (mod LN)`, then `x += y (mod N)`.
pub fn build_map_circuit(cfg: PhaseSpaceConfig) -> Result<Circuit> {
    let (x, y, work) = registers(cfg);
    let (n, ln) = (cfg.n() as u64, cfg.ln() as u64);
    let mut circ = build_adder(&x, &y, ln - n / 2, &work)?;
    let rotation_constant = (n - (ln / 2) % n) % n;
    circ.append(&build_adder(&y[..x.len()], &x, rotation_constant, &work)?);
    Ok(circ)
}

/// Velocity inversion: `y ← -y` by complement-and-increment, then `x += y (mod N)`
/// with the negated `y`, giving `x ← x - y_old`.
pub fn build_inversion_circuit(cfg: PhaseSpaceConfig) -> Result<Circuit> {
    let (x, y, work) = registers(cfg);
    let (n, ln) = (cfg.n() as u64, cfg.ln() as u64);
    let mut circ = Circuit::new();
    for &q in &y {
        circ.push(Gate::not(q))?;
    }
    circ.append(&build_adder(&[], &y, 1, &work)?);
    circ.append(&build_adder(&y[..x.len()], &x, (ln / 2) % n, &work)?);
    Ok(circ)
}

/// Gate tallies next to the reference linear formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCountReport {
    pub n_q: u32,
    pub n_q_prime: u32,
    pub map: GateCounts,
    pub inversion: GateCounts,
    /// `10·n_q + 6·n_q' - 17`.
    pub reference_map: i64,
    /// `8·n_q + 4·n_q' - 13`.
    pub reference_inversion: i64,
    /// Whether both constructions have zero second differences in `(n_q, n_q')`.
    pub affine: bool,
}

impl GateCountReport {
    pub fn map_ratio(&self) -> f64 {
        self.map.total() as f64 / self.reference_map as f64
    }

    pub fn inversion_ratio(&self) -> f64 {
        self.inversion.total() as f64 / self.reference_inversion as f64
    }
}

pub fn reference_map_gate_count(n_q: u32, n_q_prime: u32) -> i64 {
    10 * n_q as i64 + 6 * n_q_prime as i64 - 17
}

pub fn reference_inversion_gate_count(n_q: u32, n_q_prime: u32) -> i64 {
    8 * n_q as i64 + 4 * n_q_prime as i64 - 13
}

pub fn gate_count_report(cfg: PhaseSpaceConfig) -> Result<GateCountReport> {
    let (n, m) = (cfg.n_q(), cfg.n_q_prime());
    let totals = |n: u32, m: u32| -> Result<[i64; 8]> {
        let c = PhaseSpaceConfig::new(n, m)?;
        let (a, b) = (build_map_circuit(c)?.counts(), build_inversion_circuit(c)?.counts());
        Ok([a.not, a.cnot, a.toffoli, a.touched, b.not, b.cnot, b.toffoli, b.touched].map(|v| v as i64))
    };
    let f00 = totals(n, m)?;
    let (f11, f22) = (totals(n + 1, m + 1)?, totals(n + 2, m + 2)?);
    let (f01, f02, f12) = (totals(n, m + 1)?, totals(n, m + 2)?, totals(n + 1, m + 2)?);
    let affine = (0..8).all(|k| {
        f22[k] - 2 * f11[k] + f00[k] == 0 && f02[k] - 2 * f01[k] + f00[k] == 0 && f12[k] - f11[k] - f02[k] + f01[k] == 0
    });
    Ok(GateCountReport {
        n_q: n,
        n_q_prime: m,
        map: build_map_circuit(cfg)?.counts(),
        inversion: build_inversion_circuit(cfg)?.counts(),
        reference_map: reference_map_gate_count(n, m),
        reference_inversion: reference_inversion_gate_count(n, m),
        affine,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub n_q: u32,
    pub n_q_prime: u32,
    pub total_qubits: u32,
}

/// Smallest register sizes whose `N²` lattice points per cell can host
/// `n_particles` particles on a torus of length `torus_length`.
pub fn resource_estimate(n_particles: f64, torus_length: u64) -> Result<ResourceEstimate> {
    if !(n_particles >= 1.0) || !n_particles.is_finite() {
        return domain(format!("particle count must be a finite number >= 1, got {n_particles}"));
    }
    if torus_length < 2 || !torus_length.is_power_of_two() {
        return domain(format!("torus length must be a power of two >= 2, got {torus_length}"));
    }
    let mut n_q = 2u32;
    while 4f64.powi(n_q as i32) < n_particles {
        n_q += 1;
    }
    let n_q_prime = n_q + torus_length.trailing_zeros();
    Ok(ResourceEstimate { n_q, n_q_prime, total_qubits: n_q + 2 * n_q_prime - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticePoint;
    use proptest::prelude::*;

    fn cfg(n_q: u32, n_qp: u32) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(n_q, n_qp).unwrap()
    }

    /// Basis index with `value` written little-endian into `qubits`.
    fn encode(assign: &[(&[usize], u64)]) -> usize {
        let mut idx = 0;
        for (qs, v) in assign {
            for (k, &q) in qs.iter().enumerate() {
                idx |= ((v >> k & 1) as usize) << q;
            }
        }
        idx
    }

    fn read(idx: usize, qs: &[usize]) -> u64 {
        qs.iter().enumerate().map(|(k, &q)| ((idx >> q & 1) as u64) << k).sum()
    }

    fn exhaustive_adder_check(w: usize, m: usize, constant: u64) {
        let src: Vec<usize> = (0..w).collect();
        let dst: Vec<usize> = (w..w + m).collect();
        let work: Vec<usize> = (w + m..w + 2 * m - 1).collect();
        let c = build_adder(&src, &dst, constant, &work).unwrap();
        for s in 0..1u64 << w {
            for d in 0..1u64 << m {
                let out = c.apply_to_basis(encode(&[(&src, s), (&dst, d)]));
                assert_eq!(read(out, &src), s);
                assert_eq!(read(out, &dst), (d + s + constant) % (1 << m), "w={w} m={m} K={constant} s={s} d={d}");
                assert_eq!(read(out, &work), 0);
            }
        }
    }

    #[test]
    fn adder_examples() {
        let src = [0, 1, 2];
        let dst = [3, 4, 5];
        let work = [6, 7];
        let identity = build_adder(&[], &dst, 0, &work).unwrap();
        assert!(identity.is_empty());
        let plain = build_adder(&src, &dst, 0, &work).unwrap();
        assert_eq!(read(plain.apply_to_basis(encode(&[(&src, 3), (&dst, 6)])), &dst), 1);
        let with_const = build_adder(&src, &dst, 5, &work).unwrap();
        assert_eq!(read(with_const.apply_to_basis(encode(&[(&src, 0), (&dst, 6)])), &dst), 3);
        assert!(build_adder(&src, &dst, 0, &work[..1]).is_err());
        assert!(build_adder(&src, &dst, 8, &work).is_err());
        assert!(build_adder(&src, &[0, 4, 5], 0, &work).is_err());
    }

    #[test]
    fn adders_are_exhaustively_correct() {
        for m in 1..=4 {
            for w in 0..=m {
                for constant in 0..1u64 << m {
                    exhaustive_adder_check(w, m, constant);
                }
            }
        }
    }

    #[test]
    fn map_circuit_examples() {
        let c = cfg(2, 3);
        let layout = RegisterLayout::new(c);
        let map = build_map_circuit(c).unwrap();
        assert_eq!(map.apply_to_basis(layout.basis_index(1, 2, 0)), layout.basis_index(2, 1, 0));
        assert_eq!(map.apply_to_basis(layout.basis_index(2, 4, 0)), layout.basis_index(2, 4, 0));
        let inv = build_inversion_circuit(c).unwrap();
        assert_eq!(inv.apply_to_basis(layout.basis_index(2, 4, 0)), layout.basis_index(2, 4, 0));
        assert_eq!(inv.apply_to_basis(layout.basis_index(2, 1, 0)), layout.basis_index(1, 7, 0));
    }

    #[test]
    fn circuits_match_lattice_oracle_exhaustively() {
        for (n_q, n_qp) in [(2, 3), (2, 4), (3, 4), (3, 5), (4, 6)] {
            let c = cfg(n_q, n_qp);
            let layout = RegisterLayout::new(c);
            let map = build_map_circuit(c).unwrap();
            let inv = build_inversion_circuit(c).unwrap();
            map.validate(layout.total_qubits()).unwrap();
            inv.validate(layout.total_qubits()).unwrap();
            let mut image = vec![false; c.lattice_size()];
            for flat in 0..c.lattice_size() {
                let p = c.point_at(flat);
                let idx = layout.basis_index(p.i, p.j, 0);
                let f = c.forward(p).unwrap();
                let out = map.apply_to_basis(idx);
                assert_eq!(layout.decode(out), (f.i, f.j, 0));
                image[c.flat_index(f)] = true;
                let v = c.invert_velocity(p).unwrap();
                assert_eq!(layout.decode(inv.apply_to_basis(idx)), (v.i, v.j, 0));
                assert_eq!(inv.apply_to_basis(inv.apply_to_basis(idx)), idx);
                // reversal identity: Inv F^k Inv F^k = id
                for k in 1..=5 {
                    let mut s = idx;
                    for _ in 0..k {
                        s = map.apply_to_basis(s);
                    }
                    s = inv.apply_to_basis(s);
                    for _ in 0..k {
                        s = map.apply_to_basis(s);
                    }
                    s = inv.apply_to_basis(s);
                    assert_eq!(s, idx);
                }
            }
            assert!(image.iter().all(|&b| b));
        }
    }

    #[test]
    fn circuits_use_classical_gates_without_adjacent_repeats() {
        for (n_q, n_qp) in [(2, 3), (5, 8), (7, 10)] {
            for circ in [build_map_circuit(cfg(n_q, n_qp)).unwrap(), build_inversion_circuit(cfg(n_q, n_qp)).unwrap()] {
                assert!(circ.gates().iter().all(Gate::is_classical));
                assert!(circ.gates().windows(2).all(|w| w[0] != w[1]));
                let recount = circ.gates().iter().fold(GateCounts::default(), |mut acc, g| {
                    acc.add(g, 1);
                    acc
                });
                assert_eq!(recount, circ.counts());
            }
        }
        let mut c = Circuit::new();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.counts(), GateCounts::default());
        assert!(c.push(Gate::Rot { target: 0, axis: [0.0, 0.0, 1.0], angle: 0.1 }).is_err());
    }

    #[test]
    fn gate_counts_are_affine_and_reported() {
        let a = gate_count_report(cfg(4, 7)).unwrap();
        let b = gate_count_report(cfg(5, 8)).unwrap();
        let c = gate_count_report(cfg(6, 9)).unwrap();
        assert!(a.affine && b.affine && c.affine);
        let step = |x: GateCounts, y: GateCounts| (y.not as i64 - x.not as i64, y.cnot as i64 - x.cnot as i64, y.toffoli as i64 - x.toffoli as i64);
        assert_eq!(step(a.map, b.map), step(b.map, c.map));
        assert_eq!(reference_map_gate_count(7, 10), 113);
        for n_q in 3..=7 {
            for extra in 1..=4 {
                let r = gate_count_report(cfg(n_q, n_q + extra)).unwrap();
                assert!(r.map.total() as i64 <= 4 * r.reference_map, "{r:?}");
                assert!(r.inversion.total() as i64 <= 4 * r.reference_inversion, "{r:?}");
            }
        }
    }

    #[test]
    fn text_dump_round_trips() {
        let c = build_map_circuit(cfg(2, 3)).unwrap();
        let text = c.to_text();
        assert!(text.lines().all(|l| l.starts_with("NOT ") || l.starts_with("CNOT ") || l.starts_with("TOFFOLI ")));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
        assert!(Circuit::from_text("SWAP 1 2").is_err());
        assert!(Circuit::from_text("CNOT 1").is_err());
    }

    #[test]
    fn resource_examples() {
        let r = resource_estimate(6.022e23, 8).unwrap();
        assert_eq!((r.n_q, r.n_q_prime, r.total_qubits), (40, 43, 125));
        let r = resource_estimate(1.0, 2).unwrap();
        assert_eq!((r.n_q, r.n_q_prime, r.total_qubits), (2, 3, 7));
        assert_eq!(RegisterLayout::new(cfg(7, 10)).total_qubits(), 26);
        assert!(resource_estimate(10.0, 6).is_err());
        assert!(resource_estimate(0.0, 8).is_err());
    }

    #[test]
    fn state_vector_agrees_with_basis_simulation() {
        let c = cfg(2, 3);
        let layout = RegisterLayout::new(c);
        let map = build_map_circuit(c).unwrap();
        let p = LatticePoint::new(1, 2);
        let mut s = QuantumState::uniform_superposition(layout, &[p]).unwrap();
        map.apply(&mut s).unwrap();
        assert_eq!(s.marginal_xy().get(c.forward(p).unwrap()), 1.0);
    }

    proptest! {
        #[test]
        fn wide_adders_add(s in 0u64..1 << 6, d in 0u64..1 << 9, k in 0u64..1 << 9) {
            let src: Vec<usize> = (0..6).collect();
            let dst: Vec<usize> = (6..15).collect();
            let work: Vec<usize> = (15..23).collect();
            for constant in [k, (1 << 9) - (1 << 5)] {
                let c = build_adder(&src, &dst, constant, &work).unwrap();
                let out = c.apply_to_basis(encode(&[(&src, s), (&dst, d)]));
                prop_assert_eq!(read(out, &dst), (d + s + constant) % (1 << 9));
                prop_assert_eq!(read(out, &work), 0);
                prop_assert_eq!(read(out, &src), s);
            }
        }
    }
}
