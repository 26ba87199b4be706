//! 2D convolution and the two enhancement filters (Laplacian, Sobel magnitude).
//!
//! Kernels are applied in correlation convention (no flip), with replicated
//! borders. Outputs are real-valued; negative responses are preserved.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::frame::GrayFrame;
use crate::Result;

/// Fixed 3x3 kernel, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel3x3(pub [f64; 9]);

/// `[[0,1,0],[1,-4,1],[0,1,0]]`
pub const LAPLACIAN: Kernel3x3 = Kernel3x3([0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0]);
/// `[[-1,0,1],[-2,0,2],[-1,0,1]]`
pub const SOBEL_X: Kernel3x3 = Kernel3x3([-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0]);
/// `[[1,2,1],[0,0,0],[-1,-2,-1]]`
pub const SOBEL_Y: Kernel3x3 = Kernel3x3([1.0, 2.0, 1.0, 0.0, 0.0, 0.0, -1.0, -2.0, -1.0]);

/// Real-valued image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl FloatImage {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> FloatImage {
        assert_eq!(data.len(), (width * height) as usize);
        FloatImage {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: u32, height: u32) -> FloatImage {
        FloatImage {
            width,
            height,
            data: vec![0.0; (width * height) as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: f64) {
        self.data[(y * self.width + x) as usize] = v;
    }
}

impl From<&GrayFrame> for FloatImage {
    fn from(frame: &GrayFrame) -> FloatImage {
        FloatImage {
            width: frame.width,
            height: frame.height,
            data: frame.data.iter().map(|&v| v as f64).collect(),
        }
    }
}

/// The three enhancement options applied to the cropped ROI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    None,
    Laplacian,
    Sobel,
}

impl FilterKind {
    pub const ALL: [FilterKind; 3] = [FilterKind::None, FilterKind::Laplacian, FilterKind::Sobel];

    /// Apply this filter to a grayscale crop, yielding the image the corner
    /// detector and tracker both operate on.
    pub fn apply(self, frame: &GrayFrame) -> Result<FloatImage> {
        match self {
            FilterKind::None => Ok(FloatImage::from(frame)),
            FilterKind::Laplacian => laplacian_filter(&FloatImage::from(frame)),
            FilterKind::Sobel => sobel_magnitude(&FloatImage::from(frame)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FilterKind::None => "filterless",
            FilterKind::Laplacian => "laplacian",
            FilterKind::Sobel => "sobel",
        }
    }
}

/// Correlate `img` with a 3x3 kernel; replicated borders, same output size.
pub fn convolve2d(img: &FloatImage, kernel: &Kernel3x3) -> Result<FloatImage> {
    let (w, h) = (img.width as usize, img.height as usize);
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            w: img.width,
            h: img.height,
        });
    }
    let k = &kernel.0;
    let src = &img.data;
    let mut out = vec![0.0; w * h];

    // interior: straight-line slices, no clamping
    for y in 1..h - 1 {
        let up = &src[(y - 1) * w..y * w];
        let mid = &src[y * w..(y + 1) * w];
        let dn = &src[(y + 1) * w..(y + 2) * w];
        let dst = &mut out[y * w..(y + 1) * w];
        for x in 1..w - 1 {
            dst[x] = k[0] * up[x - 1]
                + k[1] * up[x]
                + k[2] * up[x + 1]
                + k[3] * mid[x - 1]
                + k[4] * mid[x]
                + k[5] * mid[x + 1]
                + k[6] * dn[x - 1]
                + k[7] * dn[x]
                + k[8] * dn[x + 1];
        }
    }

    // borders: clamp source coordinates (edge replication)
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        src[cy * w + cx]
    };
    let mut border = |x: usize, y: usize| {
        let mut acc = 0.0;
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                acc += k[((dy + 1) * 3 + dx + 1) as usize] * at(x as isize + dx, y as isize + dy);
            }
        }
        out[y * w + x] = acc;
    };
    for x in 0..w {
        border(x, 0);
        border(x, h - 1);
    }
    for y in 1..h - 1 {
        border(0, y);
        border(w - 1, y);
    }

    Ok(FloatImage::new(img.width, img.height, out))
}

/// Second-derivative edge response: correlation with the Laplacian kernel.
pub fn laplacian_filter(img: &FloatImage) -> Result<FloatImage> {
    convolve2d(img, &LAPLACIAN)
}

/// Gradient magnitude `sqrt(Gx^2 + Gy^2)` from the two Sobel kernels,
/// computed in one fused pass.
pub fn sobel_magnitude(img: &FloatImage) -> Result<FloatImage> {
    let (w, h) = (img.width as usize, img.height as usize);
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            w: img.width,
            h: img.height,
        });
    }
    let src = &img.data;
    let mut out = vec![0.0; w * h];
    for y in 1..h - 1 {
        let up = &src[(y - 1) * w..y * w];
        let mid = &src[y * w..(y + 1) * w];
        let dn = &src[(y + 1) * w..(y + 2) * w];
        let dst = &mut out[y * w..(y + 1) * w];
        for x in 1..w - 1 {
            let gx =
                up[x + 1] - up[x - 1] + 2.0 * (mid[x + 1] - mid[x - 1]) + dn[x + 1] - dn[x - 1];
            let gy = up[x - 1] + 2.0 * up[x] + up[x + 1] - dn[x - 1] - 2.0 * dn[x] - dn[x + 1];
            dst[x] = (gx * gx + gy * gy).sqrt();
        }
    }

    // borders via the generic clamped path of both kernels
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        src[cy * w + cx]
    };
    let mut border = |x: usize, y: usize| {
        let (xi, yi) = (x as isize, y as isize);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                let v = at(xi + dx, yi + dy);
                gx += SOBEL_X.0[((dy + 1) * 3 + dx + 1) as usize] * v;
                gy += SOBEL_Y.0[((dy + 1) * 3 + dx + 1) as usize] * v;
            }
        }
        out[y * w + x] = (gx * gx + gy * gy).sqrt();
    };
    for x in 0..w {
        border(x, 0);
        border(x, h - 1);
    }
    for y in 1..h - 1 {
        border(0, y);
        border(w - 1, y);
    }
    Ok(FloatImage::new(img.width, img.height, out))
}

/// The two raw Sobel responses, used by the structure tensor.
pub fn sobel_gradients(img: &FloatImage) -> Result<(FloatImage, FloatImage)> {
    Ok((convolve2d(img, &SOBEL_X)?, convolve2d(img, &SOBEL_Y)?))
}
