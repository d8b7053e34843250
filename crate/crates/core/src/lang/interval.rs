//! Finite unions of real intervals, used as admissible-distance sets.

use std::fmt;

use super::CmpOp;

/// Absolute tolerance of `=` and `!=` on distances.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Seg {
    lo: f64,
    lo_closed: bool,
    hi: f64,
    hi_closed: bool,
}

impl Seg {
    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn intersect(&self, o: &Seg) -> Seg {
        let (lo, lo_closed) = if self.lo > o.lo {
            (self.lo, self.lo_closed)
        } else if o.lo > self.lo {
            (o.lo, o.lo_closed)
        } else {
            (self.lo, self.lo_closed && o.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < o.hi {
            (self.hi, self.hi_closed)
        } else if o.hi < self.hi {
            (o.hi, o.hi_closed)
        } else {
            (self.hi, self.hi_closed && o.hi_closed)
        };
        Seg {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    /// Smallest integer inside the segment, if any.
    fn first_integer(&self) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let mut k = if self.lo == f64::NEG_INFINITY {
            f64::MIN
        } else {
            self.lo.ceil()
        };
        if k == self.lo && !self.lo_closed {
            k += 1.0;
        }
        self.contains(k).then_some(k)
    }
}

/// A finite union of disjoint real intervals, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    segs: Vec<Seg>,
}

impl Interval {
    pub fn all() -> Interval {
        Interval::from_seg(f64::NEG_INFINITY, false, f64::INFINITY, false)
    }

    pub fn empty() -> Interval {
        Interval { segs: Vec::new() }
    }

    pub fn point(x: f64) -> Interval {
        Interval::from_seg(x, true, x, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::from_seg(lo, true, hi, true)
    }

    pub fn non_negative() -> Interval {
        Interval::from_seg(0.0, true, f64::INFINITY, false)
    }

    pub fn from_seg(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Interval {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        let s = Seg {
            lo,
            lo_closed,
            hi,
            hi_closed,
        };
        Interval {
            segs: if s.is_empty() { Vec::new() } else { vec![s] },
        }
    }

    /// Distances `d` with `d op t`, using the same tolerance as [`CmpOp::holds`].
    pub fn from_op(op: CmpOp, t: f64) -> Interval {
        let inf = f64::INFINITY;
        match op {
            CmpOp::Lt => Interval::from_seg(-inf, false, t, false),
            CmpOp::Le => Interval::from_seg(-inf, false, t, true),
            CmpOp::Gt => Interval::from_seg(t, false, inf, false),
            CmpOp::Ge => Interval::from_seg(t, true, inf, false),
            CmpOp::Eq => Interval::closed(t - TOLERANCE, t + TOLERANCE),
            CmpOp::Ne => Interval::closed(t - TOLERANCE, t + TOLERANCE).complement(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.segs.iter().any(|s| s.contains(x))
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let mut segs = Vec::new();
        for a in &self.segs {
            for b in &other.segs {
                let s = a.intersect(b);
                if !s.is_empty() {
                    segs.push(s);
                }
            }
        }
        normalize(segs)
    }

    pub fn union(&self, other: &Interval) -> Interval {
        normalize(self.segs.iter().chain(&other.segs).copied().collect())
    }

    pub fn complement(&self) -> Interval {
        let mut out = Vec::new();
        let (mut lo, mut lo_closed) = (f64::NEG_INFINITY, false);
        for s in &self.segs {
            out.push(Seg {
                lo,
                lo_closed,
                hi: s.lo,
                hi_closed: !s.lo_closed && s.lo.is_finite(),
            });
            lo = s.hi;
            lo_closed = !s.hi_closed && s.hi.is_finite();
        }
        out.push(Seg {
            lo,
            lo_closed,
            hi: f64::INFINITY,
            hi_closed: false,
        });
        normalize(out.into_iter().filter(|s| !s.is_empty()).collect())
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        self.intersect(&other.complement()).is_empty()
    }

    /// Smallest integer in the set, if any.
    pub fn first_integer(&self) -> Option<f64> {
        self.segs.iter().find_map(Seg::first_integer)
    }

    pub fn contains_integer(&self) -> bool {
        self.first_integer().is_some()
    }

    /// `{x : |x - c| ∈ self}`
    pub fn absdiff_preimage(&self, c: f64) -> Interval {
        let d = self.intersect(&Interval::non_negative());
        let mut segs = Vec::new();
        for s in &d.segs {
            segs.push(Seg {
                lo: c + s.lo,
                lo_closed: s.lo_closed,
                hi: c + s.hi,
                hi_closed: s.hi_closed,
            });
            segs.push(Seg {
                lo: c - s.hi,
                lo_closed: s.hi_closed,
                hi: c - s.lo,
                hi_closed: s.lo_closed,
            });
        }
        normalize(segs.into_iter().filter(|s| !s.is_empty()).collect())
    }

    /// Lower and upper bounds of the whole set.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        Some((self.segs.first()?.lo, self.segs.last()?.hi))
    }

    /// Some point of the set, preferring a midpoint of the first segment
    /// and an integer when one is nearby.
    pub fn sample(&self) -> Option<f64> {
        let s = self.segs.first()?;
        let x = match (s.lo.is_finite(), s.hi.is_finite()) {
            (true, true) => (s.lo + s.hi) / 2.0,
            (true, false) => s.lo + 1.0,
            (false, true) => s.hi - 1.0,
            (false, false) => 0.0,
        };
        let r = x.round();
        Some(if s.contains(r) { r } else { x })
    }

    /// Segments as `(lo, lo_closed, hi, hi_closed)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, bool, f64, bool)> + '_ {
        self.segs.iter().map(|s| (s.lo, s.lo_closed, s.hi, s.hi_closed))
    }
}

fn normalize(mut segs: Vec<Seg>) -> Interval {
    segs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<Seg> = Vec::with_capacity(segs.len());
    for s in segs {
        if let Some(last) = out.last_mut() {
            let touches = s.lo < last.hi || (s.lo == last.hi && (s.lo_closed || last.hi_closed));
            if touches {
                if s.hi > last.hi {
                    last.hi = s.hi;
                    last.hi_closed = s.hi_closed;
                } else if s.hi == last.hi {
                    last.hi_closed |= s.hi_closed;
                }
                continue;
            }
        }
        out.push(s);
    }
    Interval { segs: out }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segs.is_empty() {
            return f.write_str("∅");
        }
        for (i, s) in self.segs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(
                f,
                "{}{}, {}{}",
                if s.lo_closed { '[' } else { '(' },
                s.lo,
                s.hi,
                if s.hi_closed { ']' } else { ')' }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ops_and_complements() {
        let le5 = Interval::from_op(CmpOp::Le, 5.0);
        let gt5 = Interval::from_op(CmpOp::Gt, 5.0);
        assert!(le5.intersect(&gt5).is_empty());
        assert_eq!(le5.complement(), gt5);
        assert_eq!(le5.union(&gt5), Interval::all());
        assert!(Interval::from_op(CmpOp::Le, 5.0).is_subset(&Interval::from_op(CmpOp::Le, 7.0)));
        assert!(!Interval::from_op(CmpOp::Le, 7.0).is_subset(&Interval::from_op(CmpOp::Le, 5.0)));
        let ne = Interval::from_op(CmpOp::Ne, 2.0);
        assert!(!ne.contains(2.0));
        assert!(ne.contains(2.1));
        assert_eq!(ne.complement(), Interval::from_op(CmpOp::Eq, 2.0));
    }

    #[test]
    fn integers() {
        assert_eq!(Interval::from_seg(0.5, true, 1.5, true).first_integer(), Some(1.0));
        assert_eq!(Interval::from_seg(1.0, false, 2.0, false).first_integer(), None);
        assert_eq!(Interval::from_op(CmpOp::Gt, 2.0).first_integer(), Some(3.0));
    }

    #[test]
    fn preimage() {
        let p = Interval::from_op(CmpOp::Le, 2.0).absdiff_preimage(10.0);
        assert_eq!(p, Interval::closed(8.0, 12.0));
        let q = Interval::from_op(CmpOp::Gt, 2.0).absdiff_preimage(10.0);
        assert!(q.contains(7.9) && q.contains(12.1) && !q.contains(8.0) && !q.contains(10.0));
    }
}
