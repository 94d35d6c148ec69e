//! Max–min relay selection rules.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::channel::{ChannelDraw, LinkId};

/// Which channel observation the selector ranks relays by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionScheme {
    /// The estimate at the transmission instant (no outdating).
    Optimal,
    /// The estimate at the selection instant, `tau'` frames stale.
    OutdatedCsi,
    /// The Wiener prediction of the transmission-instant channel.
    Predicted,
}

impl SelectionScheme {
    pub const ALL: [SelectionScheme; 3] = [Self::Optimal, Self::OutdatedCsi, Self::Predicted];

    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::OutdatedCsi => "outdated",
            Self::Predicted => "predicted",
        }
    }
}

impl fmt::Display for SelectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown selection scheme '{0}' (expected optimal, outdated or predicted)")]
pub struct UnknownScheme(pub String);

impl FromStr for SelectionScheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" => Ok(Self::Optimal),
            "outdated" | "outdated_csi" | "outdated-csi" => Ok(Self::OutdatedCsi),
            "predicted" | "prediction" => Ok(Self::Predicted),
            _ => Err(UnknownScheme(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("draw carries no predicted channels")]
    MissingPrediction,
}

/// The relay maximizing `min(|g_1i|^2, |g_2i|^2)` over the scheme's
/// observation. Ties go to the lowest index.
pub fn select_relay(draw: &ChannelDraw, scheme: SelectionScheme) -> Result<usize, SelectionError> {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..draw.relays() {
        let value = selection_metric(draw, scheme, i)?;
        if value > best_value {
            best = i;
            best_value = value;
        }
    }
    Ok(best)
}

/// `min(|g_1i|^2, |g_2i|^2)` of the observation the scheme ranks by.
pub fn selection_metric(
    draw: &ChannelDraw,
    scheme: SelectionScheme,
    relay: usize,
) -> Result<f64, SelectionError> {
    let gain = |source| {
        let link = LinkId::new(source, relay);
        let g = match scheme {
            SelectionScheme::Optimal => draw.estimated(link),
            SelectionScheme::OutdatedCsi => draw.outdated(link),
            SelectionScheme::Predicted => draw
                .predicted(link)
                .ok_or(SelectionError::MissingPrediction)?,
        };
        Ok(g.norm_sqr())
    };
    Ok(f64::min(gain(0)?, gain(1)?))
}
