//! Uniform characteristic grids on a coordinate rectangle `[a, b] x [c, d]`.
//!
//! The first coordinate is written `v` throughout and the second `eta`.
//! Grids are node-centred: `nv` nodes in `v` (including both endpoints) and
//! `neta` nodes in `eta`, so the spacings are `(b - a) / (nv - 1)` and
//! `(d - c) / (neta - 1)`.

/// A closed coordinate rectangle `[a, b] x [c, d]` with `a < b`, `c < d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        assert!(a < b && c < d, "degenerate rectangle [{a}, {b}] x [{c}, {d}]");
        Rect { a, b, c, d }
    }

    /// Unit square `[0,1] x [0,1]`.
    pub fn unit() -> Self {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }
}

/// A uniform tensor grid on a [`Rect`].
#[derive(Debug, Clone)]
pub struct CharGrid {
    pub rect: Rect,
    pub nv: usize,
    pub neta: usize,
}

impl CharGrid {
    pub fn new(rect: Rect, nv: usize, neta: usize) -> Self {
        assert!(nv >= 2 && neta >= 2, "need at least two nodes per direction");
        CharGrid { rect, nv, neta }
    }

    pub fn dv(&self) -> f64 {
        self.rect.width() / (self.nv - 1) as f64
    }

    pub fn deta(&self) -> f64 {
        self.rect.height() / (self.neta - 1) as f64
    }

    pub fn v(&self, i: usize) -> f64 {
        debug_assert!(i < self.nv);
        self.rect.a + self.dv() * i as f64
    }

    pub fn eta(&self, j: usize) -> f64 {
        debug_assert!(j < self.neta);
        self.rect.c + self.deta() * j as f64
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nv * self.neta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the grid node nearest to `(v, eta)`.
    pub fn nearest(&self, v: f64, eta: f64) -> (usize, usize) {
        let i = ((v - self.rect.a) / self.dv()).round().clamp(0.0, (self.nv - 1) as f64);
        let j = ((eta - self.rect.c) / self.deta()).round().clamp(0.0, (self.neta - 1) as f64);
        (i as usize, j as usize)
    }
}

/// A scalar field stored at the nodes of a [`CharGrid`], row-major in `v`
/// (index `i * neta + j`).
#[derive(Debug, Clone)]
pub struct Field {
    pub nv: usize,
    pub neta: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(nv: usize, neta: usize) -> Self {
        Field { nv, neta, data: vec![0.0; nv * neta] }
    }

    pub fn full(nv: usize, neta: usize, value: f64) -> Self {
        Field { nv, neta, data: vec![value; nv * neta] }
    }

    pub fn from_fn(grid: &CharGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Field::zeros(grid.nv, grid.neta);
        for i in 0..grid.nv {
            for j in 0..grid.neta {
                out[(i, j)] = f(grid.v(i), grid.eta(j));
            }
        }
        out
    }

    /// Bilinear interpolation at `(v, eta)`; `grid` must match the storage shape.
    pub fn bilinear(&self, grid: &CharGrid, v: f64, eta: f64) -> f64 {
        debug_assert_eq!((self.nv, self.neta), (grid.nv, grid.neta));
        let fx = ((v - grid.rect.a) / grid.dv()).clamp(0.0, (self.nv - 1) as f64);
        let fy = ((eta - grid.rect.c) / grid.deta()).clamp(0.0, (self.neta - 1) as f64);
        let i0 = (fx.floor() as usize).min(self.nv - 2);
        let j0 = (fy.floor() as usize).min(self.neta - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let g = |i: usize, j: usize| self[(i, j)];
        (1.0 - tx) * (1.0 - ty) * g(i0, j0)
            + tx * (1.0 - ty) * g(i0 + 1, j0)
            + (1.0 - tx) * ty * g(i0, j0 + 1)
            + tx * ty * g(i0 + 1, j0 + 1)
    }

    /// Maximum of `|self|` over nodes where `keep` is true, ignoring NaN nodes.
    pub fn max_abs_where(&self, mut keep: impl FnMut(usize, usize) -> bool) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.nv {
            for j in 0..self.neta {
                let x = self[(i, j)];
                if x.is_finite() && keep(i, j) {
                    m = m.max(x.abs());
                }
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Field {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.neta + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Field {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.neta + j]
    }
}
