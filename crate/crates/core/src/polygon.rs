//! Newton polygons of finitely many points with rational ordinates.

use crate::error::{Error, Result};
use crate::valuation::{int, Rational, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rational,
    pub length: i64,
}

/// Lower convex hull of a point set. Vertices are extreme points only;
/// collinear interior points are absorbed into their segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, Rational)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Builds the lower hull. Points with ordinate `+∞` are ignored.
    pub fn new(points: &[(i64, Valuation)]) -> Result<Self> {
        let mut finite: Vec<(i64, Rational)> = points
            .iter()
            .filter_map(|(x, v)| v.as_finite().map(|r| (*x, r)))
            .collect();
        let mut xs: Vec<i64> = points.iter().map(|p| p.0).collect();
        xs.sort_unstable();
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(
                "newton polygon: repeated abscissa".into(),
            ));
        }
        if finite.len() < 2 {
            return Err(Error::InvalidInput(
                "newton polygon needs at least two finite points".into(),
            ));
        }
        finite.sort_by_key(|p| p.0);

        let mut hull: Vec<(i64, Rational)> = Vec::with_capacity(finite.len());
        for pt in finite {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // drop b unless it lies strictly below the chord a -> pt
                if cross(a, b, pt) <= Rational::from_integer(0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }

        let segments = hull
            .windows(2)
            .map(|w| {
                let len = w[1].0 - w[0].0;
                Segment {
                    slope: (w[1].1 - w[0].1) / int(len),
                    length: len,
                }
            })
            .collect();
        Ok(NewtonPolygon {
            vertices: hull,
            segments,
        })
    }

    pub fn slopes(&self) -> Vec<(Rational, i64)> {
        self.segments.iter().map(|s| (s.slope, s.length)).collect()
    }

    /// Valuations of the roots of a polynomial whose coefficient valuations
    /// produced this polygon: negated slopes, repeated by segment length.
    pub fn root_valuations(&self) -> Vec<(Rational, i64)> {
        self.segments.iter().map(|s| (-s.slope, s.length)).collect()
    }

    /// Value of the polygon at an abscissa inside its span.
    pub fn eval(&self, x: i64) -> Option<Rational> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        for w in self.vertices.windows(2) {
            if x >= w[0].0 && x <= w[1].0 {
                let t = int(x - w[0].0);
                return Some(w[0].1 + t * (w[1].1 - w[0].1) / int(w[1].0 - w[0].0));
            }
        }
        Some(first.1)
    }

    pub fn span(&self) -> (i64, i64) {
        (
            self.vertices.first().map(|v| v.0).unwrap_or(0),
            self.vertices.last().map(|v| v.0).unwrap_or(0),
        )
    }
}

/// Twice the signed area of the triangle (a, b, c); positive when b lies
/// strictly below the segment a -> c.
fn cross(a: (i64, Rational), b: (i64, Rational), c: (i64, Rational)) -> Rational {
    let abx = int(b.0 - a.0);
    let acx = int(c.0 - a.0);
    (c.1 - a.1) * abx - (b.1 - a.1) * acx
}
