use super::walk::depth_bound;
use crate::graph::Vertex;
use rand::Rng;

/// Random cuts of `0..n` into a side of fixed size `a_size` and the rest.
///
/// The law of the cut is invariant under relabelling vertices, so every
/// vertex pair crosses with the same probability. `a_size` is chosen to
/// maximise the share of crossing pairs per unit of `2^D`, which is what
/// rejection sampling over the cut pays for.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CutLaw {
    pub n: usize,
    pub a_size: usize,
    /// `⌈log2 a⌉ + ⌈log2 (n - a)⌉`.
    pub depth: u32,
    /// Probability that a fixed pair crosses.
    pub cross_prob: f64,
}

impl CutLaw {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let score = |a: usize| (a * (n - a)) as f64 / (depth_bound(a, n - a) as f64).exp2();
        let a_size = (1..=n / 2)
            .max_by(|&x, &y| score(x).partial_cmp(&score(y)).unwrap().then(y.cmp(&x)))
            .unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        Self {
            n,
            a_size,
            depth: depth_bound(a_size, n - a_size),
            cross_prob: (a_size * (n - a_size)) as f64 / pairs,
        }
    }

    /// Uniform subset of size `a_size` into `a`, the rest into `b`; both sorted.
    ///
    /// Starts from a fair coin per vertex, then flips uniformly chosen
    /// members of the larger side until the size is right. Every step commutes
    /// with relabelling, so the final set is uniform among sets of its size.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, a: &mut Vec<Vertex>, b: &mut Vec<Vertex>) {
        let n = self.n;
        let mut mask: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.gen()).collect();
        if !n.is_multiple_of(64) {
            *mask.last_mut().expect("n >= 2") &= (1u64 << (n % 64)) - 1;
        }
        let mut size = mask.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        let has = |mask: &[u64], v: usize| mask[v / 64] >> (v % 64) & 1 == 1;
        while size != self.a_size {
            let v = rng.gen_range(0..n);
            let shrink = size > self.a_size;
            if has(&mask, v) == shrink {
                mask[v / 64] ^= 1 << (v % 64);
                size = if shrink { size - 1 } else { size + 1 };
            }
        }
        a.clear();
        b.clear();
        a.reserve(self.a_size);
        b.reserve(n - self.a_size);
        for (i, &w) in mask.iter().enumerate() {
            let base = (i * 64) as Vertex;
            let width = (n - i * 64).min(64);
            let inside = if width == 64 { !0 } else { (1u64 << width) - 1 };
            push_bits(a, base, w);
            push_bits(b, base, !w & inside);
        }
    }
}

fn push_bits(out: &mut Vec<Vertex>, base: Vertex, mut w: u64) {
    while w != 0 {
        out.push(base + w.trailing_zeros() as Vertex);
        w &= w - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn sizes_and_depth() {
        let c = CutLaw::new(2048);
        assert_eq!((c.a_size, c.depth), (1024, 20));
        let c = CutLaw::new(2);
        assert_eq!((c.a_size, c.depth, c.cross_prob), (1, 0, 1.0));
        let c = CutLaw::new(100);
        let mut rng = Seed(1).rng();
        let (mut a, mut b) = (vec![], vec![]);
        let mut hits = 0;
        for _ in 0..20000 {
            c.draw(&mut rng, &mut a, &mut b);
            assert_eq!(a.len(), c.a_size);
            assert_eq!(a.len() + b.len(), 100);
            assert!(a.windows(2).all(|w| w[0] < w[1]));
            hits += usize::from(a.contains(&3) != a.contains(&77));
        }
        let f = hits as f64 / 20000.0;
        assert!((f - c.cross_prob).abs() < 0.02, "{f} vs {}", c.cross_prob);
    }

    #[test]
    fn every_subset_equally_likely() {
        // n = 6 gives a = 2 (score 8/2^3 beats 5/2^3 and 9/2^4): fifteen subsets.
        let c = CutLaw::new(6);
        assert_eq!(c.a_size, 2);
        let mut rng = Seed(9).rng();
        let (mut a, mut b) = (vec![], vec![]);
        let mut counts = std::collections::HashMap::new();
        let draws = 200_000;
        for _ in 0..draws {
            c.draw(&mut rng, &mut a, &mut b);
            *counts.entry(a.clone()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        for (set, k) in counts {
            let f = k as f64 / draws as f64;
            assert!((f - 1.0 / 15.0).abs() < 0.004, "{set:?} {f}");
        }
    }
}
