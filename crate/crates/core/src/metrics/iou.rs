use crate::ava_data::BoundingBox;
use crate::scalar::Scalar;

/// Intersection over union of two valid boxes.
///
/// Exactly `0` for boxes whose interiors do not overlap and exactly `1` for
/// identical boxes. Symmetric in its arguments.
pub fn iou<T: Scalar>(a: &BoundingBox<T>, b: &BoundingBox<T>) -> T {
    if a == b {
        return T::one();
    }
    let iw = a.x2().min_of(b.x2()) - a.x1().max_of(b.x1());
    let ih = a.y2().min_of(b.y2()) - a.y1().max_of(b.y1());
    if iw <= T::zero() || ih <= T::zero() {
        return T::zero();
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    (inter / union).min_of(T::one())
}
