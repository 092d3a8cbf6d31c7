//! Safe wrapper around the complex matrix product.

use num_complex::Complex64 as C64;

/// Strided view of a complex matrix.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MatRef<'a> {
    pub data: &'a [C64],
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
    pub rs: usize,
    pub cs: usize,
}

impl MatRef<'_> {
    fn check(&self) {
        if self.rows > 0 && self.cols > 0 {
            let last = self.offset + (self.rows - 1) * self.rs + (self.cols - 1) * self.cs;
            assert!(last < self.data.len(), "matrix view out of bounds");
        }
    }
}

/// C ← A·B + beta·C, where C is `a.rows × b.cols` with strides (rsc, csc) from `offset`.
pub(crate) fn gemm(a: MatRef<'_>, b: MatRef<'_>, beta: f64, c: &mut [C64], offset: usize, rsc: usize, csc: usize) {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    a.check();
    b.check();
    let (m, k, n) = (a.rows, a.cols, b.cols);
    if m == 0 || n == 0 {
        return;
    }
    let last = offset + (m - 1) * rsc + (n - 1) * csc;
    assert!(last < c.len(), "output view out of bounds");
    if k == 0 {
        for i in 0..m {
            for j in 0..n {
                c[offset + i * rsc + j * csc] *= beta;
            }
        }
        return;
    }
    // SAFETY: every index touched by the kernel is bounded by the asserts above,
    // C64 has the layout of [f64; 2], and `c` is uniquely borrowed.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.data.as_ptr().add(a.offset) as *const [f64; 2],
            a.rs as isize,
            a.cs as isize,
            b.data.as_ptr().add(b.offset) as *const [f64; 2],
            b.rs as isize,
            b.cs as isize,
            [beta, 0.0],
            c.as_mut_ptr().add(offset) as *mut [f64; 2],
            rsc as isize,
            csc as isize,
        );
    }
}
