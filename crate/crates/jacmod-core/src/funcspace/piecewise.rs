//! Piecewise closed-form functions built from terms `c·(x-a)^q` and
//! `c·(x-a)^q·ln(x-a)`, zero (or constant, after integration) outside a
//! compact support. The term set is closed under differentiation and — away
//! from the `q = -1` log resonance — under antidifferentiation, which is how
//! exact derivative/antiderivative towers for the window-train constructions
//! are produced.
//!
//! Convention: every term's `center` lies at or left of its piece, so `x -
//! center ≥ 0` on the piece.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods in no_std builds
use num_traits::Float;

use crate::weights::fpow;

#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub coef: f64,
    pub center: f64,
    pub power: f64,
    pub log: bool,
}

impl Term {
    pub fn pow(coef: f64, center: f64, power: f64) -> Self {
        Term {
            coef,
            center,
            power,
            log: false,
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let dx = x - self.center;
        if dx <= 0.0 {
            // Limit from the right: x^q → 0 for q > 0 (also with a log
            // factor); constants persist; negative powers blow up.
            return if self.power > 0.0 {
                0.0
            } else if self.power == 0.0 && !self.log {
                self.coef
            } else if self.log {
                -self.coef * f64::INFINITY
            } else {
                self.coef * f64::INFINITY
            };
        }
        let v = self.coef * fpow(dx, self.power);
        if self.log {
            v * dx.ln()
        } else {
            v
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Piece {
    pub terms: Vec<Term>,
}

impl Piece {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }
}

/// Piecewise function on `[breaks[0], breaks[last]]` with constant extension
/// outside (zero for the base function, continuation constants after
/// antidifferentiation).
#[derive(Clone, Debug)]
pub struct PiecewiseFn {
    pub breaks: Vec<f64>,
    pub pieces: Vec<Piece>,
    pub left_val: f64,
    pub right_val: f64,
}

impl PiecewiseFn {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Piece>) -> Self {
        debug_assert!(breaks.len() == pieces.len() + 1);
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        PiecewiseFn {
            breaks,
            pieces,
            left_val: 0.0,
            right_val: 0.0,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breaks.len();
        if x < self.breaks[0] {
            return self.left_val;
        }
        if x >= self.breaks[n - 1] {
            return self.right_val;
        }
        let i = match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        self.pieces[i].eval(x)
    }

    pub fn derivative(&self) -> PiecewiseFn {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut terms = Vec::with_capacity(2 * p.terms.len());
                for t in &p.terms {
                    if t.log {
                        if t.power != 0.0 {
                            terms.push(Term {
                                coef: t.coef * t.power,
                                center: t.center,
                                power: t.power - 1.0,
                                log: true,
                            });
                        }
                        terms.push(Term::pow(t.coef, t.center, t.power - 1.0));
                    } else if t.power != 0.0 {
                        terms.push(Term::pow(t.coef * t.power, t.center, t.power - 1.0));
                    }
                }
                Piece { terms }
            })
            .collect();
        PiecewiseFn {
            breaks: self.breaks.clone(),
            pieces,
            left_val: 0.0,
            right_val: 0.0,
        }
    }

    /// Constant extensions become explicit pieces spanning `[-1.5, 1.5]`, so
    /// that a further antiderivative (linear there) stays representable.
    fn materialize_extension(&self) -> PiecewiseFn {
        let mut breaks = self.breaks.clone();
        let mut pieces = self.pieces.clone();
        if self.left_val != 0.0 && breaks[0] > -1.5 {
            breaks.insert(0, -1.5);
            pieces.insert(
                0,
                Piece {
                    terms: vec![Term::pow(self.left_val, -2.5, 0.0)],
                },
            );
        }
        if self.right_val != 0.0 && *breaks.last().unwrap() < 1.5 {
            let lo = *breaks.last().unwrap();
            breaks.push(1.5);
            pieces.push(Piece {
                terms: vec![Term::pow(self.right_val, lo, 0.0)],
            });
        }
        // Queries stay within [-1, 1], so the extension pieces cover every
        // reachable point; the out-of-range constants are dropped.
        PiecewiseFn {
            breaks,
            pieces,
            left_val: 0.0,
            right_val: 0.0,
        }
    }

    /// Exact antiderivative with `F(anchor) = 0`, continuous across the
    /// breakpoints. Fails on the `q = -1` log resonance.
    pub fn antiderivative(&self, anchor: f64) -> Result<PiecewiseFn, &'static str> {
        if self.left_val != 0.0 || self.right_val != 0.0 {
            return self.materialize_extension().antiderivative(anchor);
        }
        let mut pieces: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let mut terms = Vec::with_capacity(p.terms.len() + 1);
            for t in &p.terms {
                if t.power == -1.0 {
                    if t.log {
                        return Err("antiderivative hits the log^2 resonance (power = -1 with log factor)");
                    }
                    terms.push(Term {
                        coef: t.coef,
                        center: t.center,
                        power: 0.0,
                        log: true,
                    });
                } else if t.log {
                    let q1 = t.power + 1.0;
                    terms.push(Term {
                        coef: t.coef / q1,
                        center: t.center,
                        power: q1,
                        log: true,
                    });
                    terms.push(Term::pow(-t.coef / (q1 * q1), t.center, q1));
                } else {
                    terms.push(Term::pow(t.coef / (t.power + 1.0), t.center, t.power + 1.0));
                }
            }
            pieces.push(Piece { terms });
        }
        // Continuity constants, then shift so F(anchor) = 0. The base
        // function vanishes outside its support, so F is constant there.
        debug_assert!(self.left_val == 0.0 && self.right_val == 0.0);
        let n = pieces.len();
        let mut consts = vec![0.0; n];
        let mut carry = 0.0;
        for i in 0..n {
            let at_lo = pieces[i].eval(self.breaks[i]);
            consts[i] = carry - at_lo;
            carry = pieces[i].eval(self.breaks[i + 1]) + consts[i];
        }
        let right_val = carry;
        let offset = if anchor < self.breaks[0] {
            0.0
        } else if anchor >= self.breaks[n] {
            right_val
        } else {
            let i = match self
                .breaks
                .binary_search_by(|b| b.partial_cmp(&anchor).unwrap())
            {
                Ok(i) => i.min(n - 1),
                Err(i) => i - 1,
            };
            pieces[i].eval(anchor) + consts[i]
        };
        for (i, piece) in pieces.iter_mut().enumerate() {
            piece
                .terms
                .push(Term::pow(consts[i] - offset, self.breaks[i] - 1.0, 0.0));
        }
        Ok(PiecewiseFn {
            breaks: self.breaks.clone(),
            pieces,
            left_val: -offset,
            right_val: right_val - offset,
        })
    }
}
