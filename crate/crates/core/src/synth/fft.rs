//! Iterative radix-2 Cooley–Tukey FFT.
//!
//! Forward transform: `X[k] = Σₙ x[n]·e^{−2πi·kn/N}`. The inverse carries
//! the `1/N` factor.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Transforms `signal` in place.
pub fn fft_in_place(signal: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = signal.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::domain(format!("FFT length must be a power of two, got {n}")));
    }
    if n == 1 {
        return Ok(());
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            signal.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        // Twiddles are computed directly rather than by repeated
        // multiplication, which would accumulate rounding error.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / size as f64))
            .collect();
        for block in signal.chunks_exact_mut(size) {
            let (lo, hi) = block.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
            }
        }
        size *= 2;
    }

    if inverse {
        let scale = 1.0 / n as f64;
        signal.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(())
}

/// Forward (or, with `inverse`, normalized inverse) transform of `signal`.
pub fn fft(signal: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let mut out = signal.to_vec();
    fft_in_place(&mut out, inverse)?;
    Ok(out)
}

/// Transform of a real signal.
pub fn fft_real(signal: &[f64]) -> Result<Vec<Complex64>> {
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false)?;
    Ok(buf)
}
