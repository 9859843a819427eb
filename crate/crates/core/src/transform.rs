//! Single-point fractal transformation: the masked address of a point under
//! the target system, coded by the source system.
//!
//! The target system is reverse-iterated (its masked section supplies the
//! address) and the source system is forward-coded. Rendering steals the
//! colour at the returned source point.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mask::Symbol;
use crate::precision::{PrecisionPolicy, Resolved};
use crate::system::IfsSystem;

/// `coding_map(src, section_address(tgt, p, m))`.
pub fn transform_point<const D: usize>(
    tgt: &IfsSystem<D>,
    src: &IfsSystem<D>,
    p: &Point<D>,
    m: usize,
) -> Result<Point<D>> {
    check_pair(tgt, src)?;
    let addr = tgt.section_address(p, m)?;
    Ok(src.coding_map(&addr))
}

pub fn check_pair<const D: usize>(tgt: &IfsSystem<D>, src: &IfsSystem<D>) -> Result<()> {
    if tgt.len() != src.len() {
        return Err(Error::Incompatible(format!(
            "target has {} maps, source has {}",
            tgt.len(),
            src.len()
        )));
    }
    Ok(())
}

/// A target/source pair with its code length fixed, ready to evaluate many
/// points.
#[derive(Clone, Debug)]
pub struct Transformer<'a, const D: usize> {
    pub tgt: &'a IfsSystem<D>,
    pub src: &'a IfsSystem<D>,
    pub precision: Resolved,
}

impl<'a, const D: usize> Transformer<'a, D> {
    pub fn new(
        tgt: &'a IfsSystem<D>,
        src: &'a IfsSystem<D>,
        policy: &PrecisionPolicy,
    ) -> Result<Self> {
        check_pair(tgt, src)?;
        let precision = policy.resolve(tgt, src)?;
        Ok(Transformer {
            tgt,
            src,
            precision,
        })
    }

    pub fn code_length(&self) -> usize {
        self.precision.code_length
    }

    /// The source point whose content belongs at `p`.
    pub fn pull_back(&self, p: &Point<D>) -> Result<Point<D>> {
        self.pull_back_counted(p).map(|(q, _)| q)
    }

    /// As [`pull_back`](Self::pull_back), also returning the number of masked
    /// steps taken.
    pub fn pull_back_counted(&self, p: &Point<D>) -> Result<(Point<D>, usize)> {
        let m = self.precision.code_length;
        let mut symbols: [Symbol; 64] = [Symbol::from_index(0); 64];
        let mut heap = Vec::new();
        let buf: &mut [Symbol] = if m <= symbols.len() {
            &mut symbols[..m]
        } else {
            heap.resize(m, Symbol::from_index(0));
            &mut heap
        };
        let taken = if self.precision.adaptive {
            self.adaptive_address(p, buf)?
        } else {
            let mut x = *p;
            for (step, slot) in buf.iter_mut().enumerate() {
                let (s, next) = self.tgt.step_at(&x, step)?;
                *slot = s;
                x = next;
            }
            m
        };
        Ok((self.src.code_from(&buf[..taken], Point::ORIGIN), taken))
    }

    /// Fills `buf` until the product of source contraction factors along the
    /// address, over `1 - c`, drops below half the pitch. Never exceeds `M`.
    fn adaptive_address(&self, p: &Point<D>, buf: &mut [Symbol]) -> Result<usize> {
        let target = self.precision.epsilon / 2.0 * (1.0 - self.precision.src_contraction);
        let mut product = 1.0;
        let mut x = *p;
        for step in 0..buf.len() {
            let (s, next) = self.tgt.step_at(&x, step)?;
            buf[step] = s;
            x = next;
            product *= self.src.map(s).lipschitz();
            if product < target {
                return Ok(step + 1);
            }
        }
        Ok(buf.len())
    }
}
