//! Globally adaptive cubature over hyperrectangles.
//!
//! Each cell is integrated with the tensor product of the 15-point Kronrod
//! rule; the embedded 7-point Gauss tensor rule gives the error estimate.
//! The cell with the largest estimated error is split dyadically (all axes
//! halved) until the total error falls below `tolerance * integral of |f|`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15 nodes on `[-1, 1]` with Kronrod weights and Gauss weights (zero for
/// Kronrod-only nodes).
fn rule_1d() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[j] = (-XGK[j], WGK[j], wg);
        out[14 - j] = (XGK[j], WGK[j], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

#[derive(Clone, Debug)]
pub struct CubatureResult {
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CubatureFailure {
    DepthExhausted { value: f64, error: f64 },
    NonFinite,
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn evaluate_cell<F: Fn(&[f64]) -> f64>(
    f: &F,
    rule: &[(f64, f64, f64); 15],
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
) -> Cell {
    let n = lo.len();
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let jac: f64 = half.iter().product();
    let total = 15usize.pow(n as u32);
    let mut point = vec![0.0; n];
    let (mut kron, mut gauss, mut abs_sum) = (0.0, 0.0, 0.0);
    for flat in 0..total {
        let mut rem = flat;
        let (mut wk, mut wg) = (1.0, 1.0);
        for a in 0..n {
            let (node, k, g) = rule[rem % 15];
            rem /= 15;
            point[a] = mid[a] + half[a] * node;
            wk *= k;
            wg *= g;
        }
        let v = f(&point);
        kron += wk * v;
        gauss += wg * v;
        abs_sum += wk * v.abs();
    }
    let value = kron * jac;
    Cell {
        error: ((kron - gauss) * jac).abs(),
        value,
        abs_value: abs_sum * jac,
        lo,
        hi,
        depth,
    }
}

/// Integrates `f` over `[lo, hi]` to `tolerance` relative to `int |f|`.
pub fn integrate<F>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    tolerance: f64,
    max_depth: u32,
) -> Result<CubatureResult, CubatureFailure>
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(lo.len(), hi.len());
    let rule = rule_1d();
    let n = lo.len();
    let mut heap = BinaryHeap::new();
    let root = evaluate_cell(&f, &rule, lo.to_vec(), hi.to_vec(), 0);
    let (mut value, mut error, mut abs_value) = (root.value, root.error, root.abs_value);
    heap.push(root);
    let mut cells = 1;
    loop {
        if !(value.is_finite() && error.is_finite()) {
            return Err(CubatureFailure::NonFinite);
        }
        if error <= tolerance * abs_value || error == 0.0 {
            // fixed summation order
            let mut cells_vec: Vec<Cell> = heap.into_vec();
            cells_vec.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
            let value = cells_vec.iter().map(|c| c.value).sum();
            return Ok(CubatureResult { value, error, abs_value, cells });
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= max_depth {
            return Err(CubatureFailure::DepthExhausted { value, error });
        }
        value -= worst.value;
        error -= worst.error;
        abs_value -= worst.abs_value;
        for child in 0..(1usize << n) {
            let mut clo = worst.lo.clone();
            let mut chi = worst.hi.clone();
            for a in 0..n {
                let m = 0.5 * (worst.lo[a] + worst.hi[a]);
                if child >> a & 1 == 0 {
                    chi[a] = m;
                } else {
                    clo[a] = m;
                }
            }
            let c = evaluate_cell(&f, &rule, clo, chi, worst.depth + 1);
            value += c.value;
            error += c.error;
            abs_value += c.abs_value;
            heap.push(c);
        }
        cells += (1 << n) - 1;
        error = error.max(0.0);
    }
}
