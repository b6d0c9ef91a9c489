use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MaccError, Result};
use crate::grid::UserId;
use crate::scalar::SimFloat;

/// Random-stream identifiers; every draw of a trial derives from one seed.
pub(crate) const CHANNEL_STREAM: u64 = 0;
pub(crate) const SYMBOL_STREAM: u64 = 1;
pub(crate) const DEMAND_STREAM: u64 = 2;
/// Redraw `a >= 1` of a trial's channel uses stream `REDRAW_STREAM + a - 1`.
pub(crate) const REDRAW_STREAM: u64 = 3;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circularly-symmetric complex normal sample with unit variance.
pub(crate) fn complex_normal<T: SimFloat>(rng: &mut ChaCha8Rng) -> Complex<T> {
    let scale = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(T::standard_normal(rng) * scale, T::standard_normal(rng) * scale)
}

/// Channel matrix `H = [h_1, …, h_{K1K2}]` with `L` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    l: usize,
    users: usize,
    h: Vec<Complex<T>>,
    seed: Option<u64>,
}

impl<T: SimFloat> ChannelRealization<T> {
    /// i.i.d. `CN(0, 1)` entries.
    pub fn draw(l: usize, users: usize, seed: u64) -> Self {
        Self::draw_attempt(l, users, seed, 0)
    }

    /// Attempt 0 is [`draw`](Self::draw); later attempts are independent
    /// redraws tied to the same seed.
    pub fn draw_attempt(l: usize, users: usize, seed: u64, attempt: u32) -> Self {
        let stream = match attempt {
            0 => CHANNEL_STREAM,
            a => REDRAW_STREAM + u64::from(a) - 1,
        };
        let mut rng = stream_rng(seed, stream);
        let h = (0..l * users).map(|_| complex_normal(&mut rng)).collect();
        Self {
            l,
            users,
            h,
            seed: Some(seed),
        }
    }

    /// `columns[k - 1]` is `h_k`.
    pub fn from_columns(columns: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let l = columns.first().map_or(0, Vec::len);
        if l == 0 || columns.iter().any(|c| c.len() != l) {
            return Err(MaccError::Structural("channel columns must share a positive length".into()));
        }
        if columns.iter().flatten().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(MaccError::Structural("channel entries must be finite".into()));
        }
        Ok(Self {
            l,
            users: columns.len(),
            h: columns.into_iter().flatten().collect(),
            seed: None,
        })
    }

    pub fn antennas(&self) -> usize {
        self.l
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `h_k`.
    pub fn column(&self, user: UserId) -> &[Complex<T>] {
        let k = user.flat - 1;
        &self.h[k * self.l..(k + 1) * self.l]
    }
}
