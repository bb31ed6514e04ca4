//! Boxes, IoU, elliptical label assignment and distance-based box encoding.
//!
//! Everything here is pure `f64` arithmetic with no model state; these
//! functions define the supervision contract the rest of the crate trains
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in image pixels, corner form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        debug_assert!(x1 >= x0 && y1 >= y0, "corners out of order");
        Self { x0, y0, x1, y1 }
    }

    /// Top-left + size form, the annotation-file convention.
    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self::new(x, y, x + w, y + h)
    }

    pub fn from_center_size(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self::new(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn size(&self) -> (f64, f64) {
        (self.width(), self.height())
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_valid(&self) -> bool {
        self.x1 >= self.x0 && self.y1 >= self.y0 && self.x0.is_finite() && self.y1.is_finite()
    }

    pub fn has_area(&self) -> bool {
        self.width() > 0.0 && self.height() > 0.0
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.x0 * s, self.y0 * s, self.x1 * s, self.y1 * s)
    }

    pub fn center_distance(&self, other: &BBox) -> f64 {
        let (ax, ay) = self.center();
        let (bx, by) = other.center();
        ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
    }
}

/// Intersection over union. Degenerate inputs (zero union) give 0.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let ow = (a.x1.min(b.x1) - a.x0.max(b.x0)).max(0.0);
    let oh = (a.y1.min(b.y1) - a.y0.max(b.y0)).max(0.0);
    let inter = ow * oh;
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// `1 - IoU`, the regression loss on a single box pair.
pub fn iou_loss(pred: &BBox, gt: &BBox) -> f64 {
    1.0 - iou(pred, gt)
}

/// `iou_loss` together with its gradient with respect to the four
/// predicted corners `(x0, y0, x1, y1)`.
///
/// At configurations where an intersection edge is exactly degenerate the
/// loss is not differentiable; this returns the one-sided derivative that
/// treats the overlap as closed.
pub fn iou_loss_grad(pred: &BBox, gt: &BBox) -> (f64, [f64; 4]) {
    let ix0 = pred.x0.max(gt.x0);
    let iy0 = pred.y0.max(gt.y0);
    let ix1 = pred.x1.min(gt.x1);
    let iy1 = pred.y1.min(gt.y1);
    let ow = ix1 - ix0;
    let oh = iy1 - iy0;

    let (aw, ah) = pred.size();
    let inter = if ow > 0.0 && oh > 0.0 { ow * oh } else { 0.0 };
    let union = pred.area() + gt.area() - inter;
    if union <= 0.0 {
        return (1.0, [0.0; 4]);
    }
    let loss = 1.0 - inter / union;

    // d(inter)/d(pred corner): only the corner that forms the overlap edge moves it.
    let overlapping = ow > 0.0 && oh > 0.0;
    let di = if overlapping {
        [
            if pred.x0 >= gt.x0 { -oh } else { 0.0 },
            if pred.y0 >= gt.y0 { -ow } else { 0.0 },
            if pred.x1 <= gt.x1 { oh } else { 0.0 },
            if pred.y1 <= gt.y1 { ow } else { 0.0 },
        ]
    } else {
        [0.0; 4]
    };
    let da = [-ah, -aw, ah, aw];

    let mut grad = [0.0; 4];
    for k in 0..4 {
        let du = da[k] - di[k];
        // L = 1 - I/U  =>  dL = -(dI*U - I*dU)/U^2
        grad[k] = -(di[k] * union - inter * du) / (union * union);
    }
    (loss, grad)
}

/// Affine grid over a search patch: location `(i, j)` sits at pixel
/// `(origin + stride*i, origin + stride*j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Locations per side.
    pub size: usize,
    /// Pixels per grid step.
    pub stride: f64,
    /// Pixel coordinate of location (0, 0).
    pub origin: f64,
}

impl GridSpec {
    pub fn new(size: usize, stride: f64, origin: f64) -> Self {
        Self {
            size,
            stride,
            origin,
        }
    }

    /// Grid centered in a square patch: `origin = (patch - stride*(size-1)) / 2`.
    pub fn centered_in_patch(patch_size: usize, size: usize, stride: f64) -> Self {
        let origin = (patch_size as f64 - stride * (size - 1) as f64) / 2.0;
        Self::new(size, stride, origin)
    }

    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin + self.stride * i as f64,
            self.origin + self.stride * j as f64,
        )
    }
}

/// Classification label of one grid location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
    Ignore,
}

/// Per-location labels over an `S x S` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    size: usize,
    data: Vec<Label>,
}

impl LabelMap {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Label at column `i` (x index) and row `j` (y index).
    pub fn get(&self, i: usize, j: usize) -> Label {
        self.data[j * self.size + i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        let s = self.size;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, &l)| (k % s, k / s, l))
    }

    pub fn indices_of(&self, label: Label) -> Vec<(usize, usize)> {
        self.iter()
            .filter(|&(_, _, l)| l == label)
            .map(|(i, j, _)| (i, j))
            .collect()
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for &l in &self.data {
            match l {
                Label::Positive => c.0 += 1,
                Label::Negative => c.1 += 1,
                Label::Ignore => c.2 += 1,
            }
        }
        c
    }
}

/// Elliptical label assignment: positive inside the half-size ellipse,
/// negative outside the full-size ellipse, ignored in between. Boundary
/// points (quadratic form exactly 1) count as inside.
pub fn assign_labels(gt: &BBox, grid: &GridSpec) -> Result<LabelMap> {
    if !gt.has_area() {
        return Err(Error::DegenerateTarget(*gt));
    }
    let (cx, cy) = gt.center();
    let (w, h) = gt.size();
    let outer = (w / 2.0, h / 2.0);
    let inner = (w / 4.0, h / 4.0);

    let s = grid.size;
    let mut data = Vec::with_capacity(s * s);
    for j in 0..s {
        for i in 0..s {
            let (px, py) = grid.position(i, j);
            let dx = px - cx;
            let dy = py - cy;
            let e_outer = (dx / outer.0).powi(2) + (dy / outer.1).powi(2);
            let e_inner = (dx / inner.0).powi(2) + (dy / inner.1).powi(2);
            let label = if e_inner <= 1.0 {
                Label::Positive
            } else if e_outer > 1.0 {
                Label::Negative
            } else {
                Label::Ignore
            };
            data.push(label);
        }
    }
    Ok(LabelMap { size: s, data })
}

/// Per-location distances to the four target sides, plus the positive mask.
#[derive(Debug, Clone)]
pub struct RegressionTargetMap {
    size: usize,
    /// `(l, t, r, b)` per location, row-major by `(j, i)`.
    dists: Vec<[f64; 4]>,
    labels: LabelMap,
}

impl RegressionTargetMap {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 4] {
        self.dists[j * self.size + i]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.labels.get(i, j) == Label::Positive
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }
}

/// Distance-to-sides encoding of the target box at every grid location.
pub fn encode_regression(gt: &BBox, grid: &GridSpec) -> Result<RegressionTargetMap> {
    let labels = assign_labels(gt, grid)?;
    let s = grid.size;
    let mut dists = Vec::with_capacity(s * s);
    for j in 0..s {
        for i in 0..s {
            let (px, py) = grid.position(i, j);
            dists.push([px - gt.x0, py - gt.y0, gt.x1 - px, gt.y1 - py]);
        }
    }
    Ok(RegressionTargetMap {
        size: s,
        dists,
        labels,
    })
}

/// Inverse of the distance encoding at one grid point. A negative resulting
/// extent collapses to a zero-area box at the midpoint and sets the flag.
pub fn decode_box(location: (f64, f64), d: [f64; 4]) -> (BBox, bool) {
    let (px, py) = location;
    let mut x0 = px - d[0];
    let mut y0 = py - d[1];
    let mut x1 = px + d[2];
    let mut y1 = py + d[3];
    let mut clamped = false;
    if x1 < x0 {
        let m = (x0 + x1) / 2.0;
        x0 = m;
        x1 = m;
        clamped = true;
    }
    if y1 < y0 {
        let m = (y0 + y1) / 2.0;
        y0 = m;
        y1 = m;
        clamped = true;
    }
    (BBox::new(x0, y0, x1, y1), clamped)
}
