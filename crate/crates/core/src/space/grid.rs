use crate::space::MetricMeasureSpace;

/// Cell-centered rectangular grid on a box `[lo, hi]` in `d` dimensions.
///
/// Flat indices are row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    shape: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert_eq!(lo.len(), shape.len());
        assert!(shape.iter().all(|&n| n > 0), "grid axes need at least one cell");
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "empty grid box");
        Self { lo, hi, shape }
    }

    /// `[0,1]^d` with `n` cells per axis.
    pub fn unit_cube(d: usize, n: usize) -> Self {
        Self::new(vec![0.0; d], vec![1.0; d], vec![n; d])
    }

    /// `[a,b]^d` with `n` cells per axis.
    pub fn cube(d: usize, a: f64, b: f64, n: usize) -> Self {
        Self::new(vec![a; d], vec![b; d], vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| {
                debug_assert!(i < n);
                acc * n + i
            })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        out
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.lo[a] + (i as f64 + 0.5) * self.spacing(a))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Flat index of the cell containing `x`, clamped to the grid.
    pub fn nearest(&self, x: &[f64]) -> usize {
        let multi: Vec<usize> = (0..self.dim())
            .map(|a| {
                let i = ((x[a] - self.lo[a]) / self.spacing(a)).floor();
                (i.max(0.0) as usize).min(self.shape[a] - 1)
            })
            .collect();
        self.index(&multi)
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.point(i))).collect()
    }

    /// Euclidean space on the cell centers with cell-volume weights.
    pub fn space(&self) -> MetricMeasureSpace {
        MetricMeasureSpace::euclidean(vec![self.cell_volume(); self.len()], self.points())
            .expect("grid cells are valid points")
    }

    /// Partial derivative along `axis`: central differences inside, one-sided at the boundary.
    pub fn partial(&self, values: &[f64], axis: usize) -> Vec<f64> {
        assert_eq!(values.len(), self.len());
        let n = self.shape[axis];
        let h = self.spacing(axis);
        let stride = self.stride(axis);
        (0..self.len())
            .map(|flat| {
                if n == 1 {
                    return 0.0;
                }
                let i = (flat / stride) % n;
                if i == 0 {
                    (values[flat + stride] - values[flat]) / h
                } else if i == n - 1 {
                    (values[flat] - values[flat - stride]) / h
                } else {
                    (values[flat + stride] - values[flat - stride]) / (2.0 * h)
                }
            })
            .collect()
    }

    /// All partial derivatives, one vector per axis.
    pub fn gradient(&self, values: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|a| self.partial(values, a)).collect()
    }

    /// Pointwise Euclidean norm of the discrete gradient.
    pub fn gradient_norm(&self, values: &[f64]) -> Vec<f64> {
        let grad = self.gradient(values);
        (0..self.len())
            .map(|i| grad.iter().map(|g| g[i] * g[i]).sum::<f64>().sqrt())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = Grid::new(vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 3.0], vec![3, 4, 5]);
        for flat in 0..g.len() {
            assert_eq!(g.index(&g.multi_index(flat)), flat);
            assert_eq!(g.nearest(&g.point(flat)), flat);
        }
    }

    #[test]
    fn gradient_of_linear_function_is_exact() {
        let g = Grid::unit_cube(2, 8);
        let f = g.sample(|x| 3.0 * x[0] - 2.0 * x[1]);
        let dx = g.partial(&f, 0);
        let dy = g.partial(&f, 1);
        assert!(dx.iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(dy.iter().all(|v| (v + 2.0).abs() < 1e-12));
        let norm = g.gradient_norm(&f);
        assert!(norm.iter().all(|v| (v - 13f64.sqrt()).abs() < 1e-12));
    }
}
