//! Step graphons `W_{z,A}`: block weights plus a symmetric value matrix.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, q, qi, NumRepr, Q};

/// Whether the entries are meant exactly or came from floating-point input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Exact,
    Float,
}

/// Tolerance on the weight sum for float-tagged graphons.
pub const FLOAT_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphonJson", into = "GraphonJson")]
pub struct StepGraphon {
    weights: Vec<Q>,
    values: Vec<Vec<Q>>,
    precision: Precision,
}

#[derive(Serialize, Deserialize)]
struct GraphonJson {
    weights: Vec<NumRepr>,
    matrix: Vec<Vec<NumRepr>>,
}

impl TryFrom<GraphonJson> for StepGraphon {
    type Error = Error;
    fn try_from(j: GraphonJson) -> Result<Self> {
        let mut exact = true;
        let mut read = |v: &NumRepr| -> Result<Q> {
            let (r, e) = v.value()?;
            exact &= e;
            Ok(r)
        };
        let weights = j.weights.iter().map(&mut read).collect::<Result<Vec<_>>>()?;
        let values = j.matrix.iter().map(|row| row.iter().map(&mut read).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let precision = if exact { Precision::Exact } else { Precision::Float };
        StepGraphon::with_precision(weights, values, precision)
    }
}

impl From<StepGraphon> for GraphonJson {
    fn from(w: StepGraphon) -> Self {
        let enc = |r: &Q| match w.precision {
            Precision::Exact => NumRepr::exact(r),
            Precision::Float => NumRepr::Float(rat::to_f64(r)),
        };
        GraphonJson { weights: w.weights.iter().map(enc).collect(), matrix: w.values.iter().map(|row| row.iter().map(enc).collect()).collect() }
    }
}

impl StepGraphon {
    /// Exact graphon; weights must sum to exactly 1.
    pub fn new(weights: Vec<Q>, values: Vec<Vec<Q>>) -> Result<Self> {
        Self::with_precision(weights, values, Precision::Exact)
    }

    /// Graphon from doubles; stored as the exact binary values, tagged float.
    pub fn from_f64(weights: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        let w = weights.iter().map(|&x| rat::from_f64(x)).collect::<Result<Vec<_>>>()?;
        let a = values.iter().map(|row| row.iter().map(|&x| rat::from_f64(x)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        Self::with_precision(w, a, Precision::Float)
    }

    pub fn with_precision(weights: Vec<Q>, values: Vec<Vec<Q>>, precision: Precision) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidGraphon("no blocks".into()));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGraphon(format!("matrix must be {n}x{n}")));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidGraphon("negative weight".into()));
        }
        let total: Q = weights.iter().sum();
        match precision {
            Precision::Exact if !total.is_one() => {
                return Err(Error::InvalidGraphon(format!("weights sum to {}, not 1", rat::fmt_q(&total))));
            }
            Precision::Float if (rat::to_f64(&total) - 1.0).abs() > FLOAT_WEIGHT_TOL => {
                return Err(Error::InvalidGraphon(format!("weights sum to {}, not 1", rat::to_f64(&total))));
            }
            _ => {}
        }
        for i in 0..n {
            for j in 0..n {
                let a = &values[i][j];
                if a.is_negative() || a > &Q::one() {
                    return Err(Error::InvalidGraphon(format!("entry ({i},{j}) outside [0,1]")));
                }
                if a != &values[j][i] {
                    return Err(Error::InvalidGraphon(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(StepGraphon { weights, values, precision })
    }

    pub fn constant(c: Q) -> Result<Self> {
        Self::new(vec![qi(1)], vec![vec![c]])
    }

    /// Weights (1-2z, z, z); A(1,2)=A(1,3)=1, A(2,3)=y, zero diagonal.
    pub fn three_block_zy(z: &Q, y: &Q) -> Result<Self> {
        Self::three_block_zy_tagged(z, y, Precision::Exact)
    }

    pub fn three_block_zy_f64(z: f64, y: f64) -> Result<Self> {
        Self::three_block_zy_tagged(&rat::from_f64(z)?, &rat::from_f64(y)?, Precision::Float)
    }

    fn three_block_zy_tagged(z: &Q, y: &Q, precision: Precision) -> Result<Self> {
        if z.is_negative() || z > &q(1, 2) || y.is_negative() || y > &qi(1) {
            return Err(Error::Domain("three_block_zy needs z in [0,1/2], y in [0,1]".into()));
        }
        let (o, l) = (qi(0), qi(1));
        let w = vec![qi(1) - qi(2) * z, z.clone(), z.clone()];
        let a = vec![vec![o.clone(), l.clone(), l.clone()], vec![l.clone(), o.clone(), y.clone()], vec![l, y.clone(), o]];
        Self::with_precision(w, a, precision)
    }

    /// Two equal blocks, diagonal p, off-diagonal 1.
    pub fn two_block_diag_p(p: &Q) -> Result<Self> {
        Self::two_block_tagged(p, Precision::Exact)
    }

    pub fn two_block_diag_p_f64(p: f64) -> Result<Self> {
        Self::two_block_tagged(&rat::from_f64(p)?, Precision::Float)
    }

    fn two_block_tagged(p: &Q, precision: Precision) -> Result<Self> {
        if p.is_negative() || p > &qi(1) {
            return Err(Error::Domain("two_block_diag_p needs p in [0,1]".into()));
        }
        let h = q(1, 2);
        Self::with_precision(vec![h.clone(), h], vec![vec![p.clone(), qi(1)], vec![qi(1), p.clone()]], precision)
    }

    /// The graphon of K_{k-1}: k-1 equal blocks, 1 off the diagonal, 0 on it.
    pub fn turan(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain("turan(k) needs k >= 2".into()));
        }
        let b = k - 1;
        let w = vec![q(1, b as i64); b];
        let a = (0..b).map(|i| (0..b).map(|j| if i == j { qi(0) } else { qi(1) }).collect()).collect();
        Self::new(w, a)
    }

    pub fn complement(&self) -> StepGraphon {
        let values = self.values.iter().map(|row| row.iter().map(|a| qi(1) - a).collect()).collect();
        StepGraphon { weights: self.weights.clone(), values, precision: self.precision }
    }

    /// Splits block `i` into two halves with identical rows.
    pub fn split_block(&self, i: usize) -> StepGraphon {
        let n = self.weights.len();
        let idx: Vec<usize> = (0..=n).map(|j| if j <= i { j } else { j - 1 }).collect();
        let mut weights: Vec<Q> = idx.iter().map(|&j| self.weights[j].clone()).collect();
        weights[i] = &self.weights[i] / qi(2);
        weights[i + 1] = weights[i].clone();
        let values = idx.iter().map(|&a| idx.iter().map(|&b| self.values[a][b].clone()).collect()).collect();
        StepGraphon { weights, values, precision: self.precision }
    }

    pub fn blocks(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn values(&self) -> &[Vec<Q>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Q {
        &self.values[i][j]
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Exact
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(rat::to_f64).collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().flatten().map(rat::to_f64).collect()
    }

    /// Whether every entry is 0 or 1 (useful for pruning).
    pub fn is_zero_one(&self) -> bool {
        self.values.iter().flatten().all(|a| a.is_zero() || a.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_examples() {
        let half = StepGraphon::constant(q(1, 2)).unwrap();
        assert_eq!(half.complement(), half);
        let k2 = StepGraphon::turan(3).unwrap();
        let c = k2.complement();
        assert_eq!(c.value(0, 0), &qi(1));
        assert_eq!(c.value(0, 1), &qi(0));
        assert_eq!(c.complement(), k2);
    }

    #[test]
    fn validation() {
        assert!(StepGraphon::new(vec![q(1, 2), q(1, 3)], vec![vec![qi(0); 2]; 2]).is_err());
        assert!(StepGraphon::new(vec![q(1, 2), q(1, 2)], vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]).is_err());
        assert!(StepGraphon::new(vec![qi(1)], vec![vec![qi(2)]]).is_err());
        assert!(StepGraphon::three_block_zy(&q(3, 5), &q(1, 2)).is_err());
    }

    #[test]
    fn json_modes() {
        let w: StepGraphon = serde_json::from_str(r#"{"weights":["1/2","1/2"],"matrix":[["1/3",1],[1,"1/3"]]}"#).unwrap();
        assert!(w.is_exact());
        let back: StepGraphon = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
        let f: StepGraphon = serde_json::from_str(r#"{"weights":[0.5,0.5],"matrix":[[0.25,1],[1,0.25]]}"#).unwrap();
        assert_eq!(f.precision(), Precision::Float);
        let back: StepGraphon = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn split_keeps_shape() {
        let w = StepGraphon::three_block_zy(&q(1, 4), &q(1, 3)).unwrap();
        let s = w.split_block(1);
        assert_eq!(s.blocks(), 4);
        assert_eq!(s.weights()[1], q(1, 8));
        assert_eq!(s.value(1, 2), s.value(1, 1));
        assert_eq!(s.value(0, 3), w.value(0, 2));
    }
}
