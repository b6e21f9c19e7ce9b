//! Planar Dubins kinematics.
//!
//! Closed-form shortest paths between two poses for a forward-only vehicle
//! with a minimum turning radius, path densification, and the
//! turning-circle test used to decide whether visiting a pose necessarily
//! crosses another task's neighborhood.
//!
//! Left turns are counter-clockwise. Segment parameters are stored as
//! lengths in meters, not normalized angles.

use serde::{Deserialize, Serialize};

use crate::scalar::{wrap_angle, Scalar};

/// A point in the plane, serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[S; 2]", into = "[S; 2]")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Point2<S: Scalar> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> From<[S; 2]> for Point2<S> {
    fn from(v: [S; 2]) -> Self {
        Self { x: v[0], y: v[1] }
    }
}

impl<S: Scalar> From<Point2<S>> for [S; 2] {
    fn from(p: Point2<S>) -> Self {
        [p.x, p.y]
    }
}

impl<S: Scalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Self) -> S {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

/// Planar pose; `theta` is always kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Config<S: Scalar> {
    pub x: S,
    pub y: S,
    pub theta: S,
}

impl<S: Scalar> Config<S> {
    pub fn new(x: S, y: S, theta: S) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn at(p: Point2<S>, theta: S) -> Self {
        Self::new(p.x, p.y, theta)
    }

    pub fn position(&self) -> Point2<S> {
        Point2::new(self.x, self.y)
    }

    /// Pose reached after driving `length` meters with constant steering.
    pub fn advance(&self, kind: SegmentKind, length: S, r_min: S) -> Self {
        let (s0, c0) = self.theta.sin_cos();
        match kind {
            SegmentKind::Straight => {
                Self::new(self.x + length * c0, self.y + length * s0, self.theta)
            }
            SegmentKind::Left => {
                let th = self.theta + length / r_min;
                let (s1, c1) = th.sin_cos();
                Self::new(self.x + r_min * (s1 - s0), self.y - r_min * (c1 - c0), th)
            }
            SegmentKind::Right => {
                let th = self.theta - length / r_min;
                let (s1, c1) = th.sin_cos();
                Self::new(self.x - r_min * (s1 - s0), self.y + r_min * (c1 - c0), th)
            }
        }
    }
}

/// Closed disk; used for task neighborhoods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Disk<S: Scalar> {
    pub center: Point2<S>,
    pub radius: S,
}

impl<S: Scalar> Disk<S> {
    pub fn new(center: Point2<S>, radius: S) -> Self {
        debug_assert!(radius > S::zero());
        Self { center, radius }
    }

    pub fn contains(&self, p: Point2<S>, tol: S) -> bool {
        self.center.distance(p) <= self.radius + tol
    }

    /// Closest point of the disk to `p`.
    pub fn project(&self, p: Point2<S>) -> Point2<S> {
        let d = self.center.distance(p);
        if d <= self.radius {
            p
        } else {
            let k = self.radius / d;
            Point2::new(
                self.center.x + (p.x - self.center.x) * k,
                self.center.y + (p.y - self.center.y) * k,
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    Left,
    Straight,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DubinsWord {
    Lsl,
    Lsr,
    Rsl,
    Rsr,
    Rlr,
    Lrl,
}

impl DubinsWord {
    pub const ALL: [DubinsWord; 6] = [
        DubinsWord::Lsl,
        DubinsWord::Lsr,
        DubinsWord::Rsl,
        DubinsWord::Rsr,
        DubinsWord::Rlr,
        DubinsWord::Lrl,
    ];

    pub fn segments(self) -> [SegmentKind; 3] {
        use SegmentKind::*;
        match self {
            DubinsWord::Lsl => [Left, Straight, Left],
            DubinsWord::Lsr => [Left, Straight, Right],
            DubinsWord::Rsl => [Right, Straight, Left],
            DubinsWord::Rsr => [Right, Straight, Right],
            DubinsWord::Rlr => [Right, Left, Right],
            DubinsWord::Lrl => [Left, Right, Left],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DubinsPath<S: Scalar> {
    pub start: Config<S>,
    pub word: DubinsWord,
    /// Segment lengths in meters.
    pub segments: [S; 3],
    pub r_min: S,
    pub length: S,
}

impl<S: Scalar> DubinsPath<S> {
    /// Pose at arc length `s` from the start, clamped to `[0, length]`.
    pub fn config_at(&self, s: S) -> Config<S> {
        let mut remaining = s.max(S::zero()).min(self.length);
        let mut pose = self.start;
        for (kind, &seg) in self.word.segments().iter().zip(self.segments.iter()) {
            let step = remaining.min(seg);
            pose = pose.advance(*kind, step, self.r_min);
            remaining = remaining - step;
            if remaining <= S::zero() {
                break;
            }
        }
        pose
    }

    pub fn end(&self) -> Config<S> {
        let mut pose = self.start;
        for (kind, &seg) in self.word.segments().iter().zip(self.segments.iter()) {
            pose = pose.advance(*kind, seg, self.r_min);
        }
        pose
    }
}

/// Normalized segment parameters `(t, p, q)` for one word, or `None` if the
/// word cannot connect the pair. Angles are in radians, `p` of CSC words is
/// a straight length in units of `r_min`.
fn word_params<S: Scalar>(word: DubinsWord, d: S, alpha: S, beta: S) -> Option<[S; 3]> {
    let two = S::lit(2.0);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let cab = (alpha - beta).cos();
    let d2 = d * d;
    // Rounding can push an exactly-zero squared length slightly negative.
    let sqrt_nonneg = |v: S| -> Option<S> {
        if v < -S::lit(1e-10) {
            None
        } else {
            Some(v.max(S::zero()).sqrt())
        }
    };
    match word {
        DubinsWord::Lsl => {
            let p = sqrt_nonneg(two + d2 - two * cab + two * d * (sa - sb))?;
            let tmp = (cb - ca).atan2(d + sa - sb);
            Some([wrap_angle(tmp - alpha), p, wrap_angle(beta - tmp)])
        }
        DubinsWord::Rsr => {
            let p = sqrt_nonneg(two + d2 - two * cab + two * d * (sb - sa))?;
            let tmp = (ca - cb).atan2(d - sa + sb);
            Some([wrap_angle(alpha - tmp), p, wrap_angle(tmp - beta)])
        }
        DubinsWord::Lsr => {
            let p = sqrt_nonneg(-two + d2 + two * cab + two * d * (sa + sb))?;
            let tmp = (-ca - cb).atan2(d + sa + sb) - (-two).atan2(p);
            Some([wrap_angle(tmp - alpha), p, wrap_angle(tmp - beta)])
        }
        DubinsWord::Rsl => {
            let p = sqrt_nonneg(d2 - two + two * cab - two * d * (sa + sb))?;
            let tmp = (ca + cb).atan2(d - sa - sb) - two.atan2(p);
            Some([wrap_angle(alpha - tmp), p, wrap_angle(beta - tmp)])
        }
        DubinsWord::Rlr => {
            let tmp = (S::lit(6.0) - d2 + two * cab + two * d * (sa - sb)) / S::lit(8.0);
            if tmp.abs() > S::one() {
                return None;
            }
            let p = wrap_angle(S::TAU() - tmp.acos());
            let t = wrap_angle(alpha - (ca - cb).atan2(d - sa + sb) + p / two);
            let q = wrap_angle(alpha - beta - t + p);
            Some([t, p, q])
        }
        DubinsWord::Lrl => {
            let tmp = (S::lit(6.0) - d2 + two * cab + two * d * (sb - sa)) / S::lit(8.0);
            if tmp.abs() > S::one() {
                return None;
            }
            let p = wrap_angle(S::TAU() - tmp.acos());
            let t = wrap_angle(-alpha - (ca - cb).atan2(d + sa - sb) + p / two);
            let q = wrap_angle(beta - alpha - t + p);
            Some([t, p, q])
        }
    }
}

/// Shortest forward path from `start` to `end` with turning radius `r_min`.
///
/// All six words are evaluated; ties keep the first word in
/// [`DubinsWord::ALL`] order, so the result is deterministic.
pub fn dubins_shortest_path<S: Scalar>(
    start: Config<S>,
    end: Config<S>,
    r_min: S,
) -> DubinsPath<S> {
    debug_assert!(r_min > S::zero());
    let dx = end.x - start.x;
    let dy = end.y - start.y;
    let d = dx.hypot(dy) / r_min;
    let phi = if d > S::zero() {
        dy.atan2(dx)
    } else {
        S::zero()
    };
    let alpha = wrap_angle(start.theta - phi);
    let beta = wrap_angle(end.theta - phi);
    let tau = S::TAU();
    let eps = S::angle_eps();

    let mut best: Option<DubinsPath<S>> = None;
    for word in DubinsWord::ALL {
        let Some(mut params) = word_params(word, d, alpha, beta) else {
            continue;
        };
        let kinds = word.segments();
        for (k, v) in kinds.iter().zip(params.iter_mut()) {
            // An arc of 2π - ε is a rounding artefact of a zero-length arc.
            if *k != SegmentKind::Straight && *v > tau - eps {
                *v = S::zero();
            }
        }
        let segments = [params[0] * r_min, params[1] * r_min, params[2] * r_min];
        let length = segments[0] + segments[1] + segments[2];
        if best.as_ref().map_or(true, |b| length < b.length) {
            best = Some(DubinsPath {
                start,
                word,
                segments,
                r_min,
                length,
            });
        }
    }
    // LSL and RSR are always feasible, so `best` is set.
    best.expect("at least one Dubins word is feasible")
}

/// Convenience: length of the shortest path only.
pub fn dubins_length<S: Scalar>(start: Config<S>, end: Config<S>, r_min: S) -> S {
    dubins_shortest_path(start, end, r_min).length
}

/// Poses along `path`, consecutive ones at most `spacing` apart (in arc
/// length), including both endpoints.
pub fn sample_path<S: Scalar>(path: &DubinsPath<S>, spacing: S) -> Vec<Config<S>> {
    debug_assert!(spacing > S::zero());
    if path.length <= S::zero() {
        return vec![path.start];
    }
    let steps = (path.length / spacing)
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let step = path.length / S::from_usize(steps).expect("step count");
    let mut out = Vec::with_capacity(steps + 1);
    for i in 0..steps {
        out.push(path.config_at(step * S::from_usize(i).expect("index")));
    }
    out.push(path.end());
    out
}

/// Centers of the left and right turning circles tangent to `c`.
pub fn turning_circles<S: Scalar>(c: Config<S>, r_min: S) -> (Point2<S>, Point2<S>) {
    let (s, co) = c.theta.sin_cos();
    let left = Point2::new(c.x - r_min * s, c.y + r_min * co);
    let right = Point2::new(c.x + r_min * s, c.y - r_min * co);
    (left, right)
}

/// Whether the circle (curve) of radius `r` around `center` meets the closed disk.
#[inline]
fn circle_meets_disk<S: Scalar>(center: Point2<S>, r: S, region: &Disk<S>) -> bool {
    (center.distance(region.center) - r).abs() <= region.radius
}

/// True iff both turning circles of `c` intersect `region`.
pub fn nin_check<S: Scalar>(c: Config<S>, r_min: S, region: &Disk<S>) -> bool {
    let (left, right) = turning_circles(c, r_min);
    circle_meets_disk(left, r_min, region) && circle_meets_disk(right, r_min, region)
}
