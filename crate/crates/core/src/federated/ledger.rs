use alloc::vec::Vec;

/// Bytes moved in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoundTraffic {
    pub round: usize,
    pub uploaded: u64,
    pub downloaded: u64,
}

/// Per-round upload/download accounting at 4 bytes per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommLedger {
    rounds: Vec<RoundTraffic>,
    total: u64,
}

impl CommLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, round: usize, uploaded: u64, downloaded: u64) {
        self.total += uploaded + downloaded;
        self.rounds.push(RoundTraffic {
            round,
            uploaded,
            downloaded,
        });
    }

    pub fn rounds(&self) -> &[RoundTraffic] {
        &self.rounds
    }

    pub fn total_bytes(&self) -> u64 {
        self.total
    }

    /// Cumulative bytes up to and including `round`.
    pub fn cumulative_at(&self, round: usize) -> u64 {
        self.rounds
            .iter()
            .filter(|r| r.round <= round)
            .map(|r| r.uploaded + r.downloaded)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_is_monotone() {
        let mut l = CommLedger::new();
        l.record(1, 40, 40);
        l.record(2, 0, 0);
        l.record(3, 8, 16);
        assert_eq!(l.cumulative_at(0), 0);
        assert_eq!(l.cumulative_at(1), 80);
        assert_eq!(l.cumulative_at(2), 80);
        assert_eq!(l.cumulative_at(3), 104);
        assert_eq!(l.total_bytes(), 104);
    }
}
