//! Single-band f64 grid, the carrier for all per-band computation.

/// An H×W grid of f64 values in row-major order.
///
/// Raster bands are widened to f64 once and all accumulation happens in
/// double precision from there.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    /// All-zero plane. Panics if either dimension is zero.
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "plane dimensions must be >= 1");
        Plane {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Wraps an existing row-major buffer. Panics on length mismatch.
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert!(width >= 1 && height >= 1, "plane dimensions must be >= 1");
        assert_eq!(data.len(), width * height, "plane buffer length mismatch");
        Plane {
            width,
            height,
            data,
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel, row-major.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructors enforce width, height >= 1
    }

    pub fn same_shape(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}
