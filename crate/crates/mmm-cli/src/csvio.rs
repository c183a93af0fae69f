//! Small deterministic CSV writers. Floats go through the standard
//! shortest-roundtrip formatting, so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn write_series<I>(path: &Path, header: &str, rows: I) -> std::io::Result<usize>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    let mut n = 0usize;
    for (a, b) in rows {
        writeln!(w, "{a},{b}")?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

pub fn write_triples<I>(path: &Path, header: &str, rows: I) -> std::io::Result<usize>
where
    I: IntoIterator<Item = (f64, f64, String)>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    let mut n = 0usize;
    for (a, b, c) in rows {
        writeln!(w, "{a},{b},{c}")?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

/// Fixed-range histogram. Samples outside `[lo, hi]` are dropped, but the
/// density stays normalized by the full sample count so missing tail mass
/// shows up as a deficit rather than being silently renormalized away.
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub total_samples: usize,
}

impl Histogram {
    pub fn build(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
        assert!(bins > 0 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &x in samples {
            if x < lo || x > hi {
                continue;
            }
            let idx = (((x - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Histogram {
            lo,
            hi,
            counts,
            total_samples: samples.len(),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "bin_left,bin_right,count,density")?;
        let bins = self.counts.len();
        let width = (self.hi - self.lo) / bins as f64;
        for (i, count) in self.counts.iter().enumerate() {
            let left = self.lo + width * i as f64;
            let right = self.lo + width * (i + 1) as f64;
            let density = *count as f64 / (self.total_samples as f64 * width);
            writeln!(w, "{left},{right},{count},{density}")?;
        }
        w.flush()
    }
}
