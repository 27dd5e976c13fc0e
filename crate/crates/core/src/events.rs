//! Single-pass Directional-change / Overshoot extraction for one threshold.
//!
//! The extractor works on natural-log prices; the threshold `delta` is a
//! log-return magnitude.
//!
//! State machine:
//!
//! * Before the first Dc the mode is undetermined. Running max and min both
//!   start at the first log-price. The first Dc fires upward when the price
//!   rises `delta` above the running min, downward when it falls `delta`
//!   below the running max.
//! * In Up mode the extremum is the running max. A Dc(Down) fires at the
//!   first tick with `extremum - x >= delta`; its confirmation level is
//!   `extremum - delta` and the new extremum is `x`. Down mode mirrors this.
//! * Overshoots are quantized from the confirmation level: the k-th Os of a
//!   cycle fires once the extremum sits `k * delta` beyond the level. A jump
//!   spanning several `delta` emits every implied Os at the same tick index.
//! * Each Dc after the first closes a cycle and yields a [`CycleRecord`]
//!   with `K` overshoots and normalized length `|extremum - level| / delta`,
//!   so `K == floor(length)` by construction. The trailing open cycle never
//!   yields a record.

use crate::error::{Error, Result};

/// Positive, finite log-return threshold.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidThreshold(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Dc,
    Os,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Dc => "dc",
            EventKind::Os => "os",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcosEvent {
    pub kind: EventKind,
    pub direction: Direction,
    pub tick_index: usize,
    /// Observed log-price of the tick that triggered the event.
    pub log_price: f64,
    /// Set only on a Dc that closes a cycle: the closed cycle's x / delta.
    pub overshoot_length_norm: Option<f64>,
}

/// One completed cycle between two consecutive Dc events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub overshoot_count: u64,
    pub overshoot_length_norm: f64,
}

/// Receives events and closed cycles as the extractor walks the series.
pub trait EventSink {
    fn on_event(&mut self, event: DcosEvent);
    fn on_cycle(&mut self, cycle: CycleRecord);
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollectingSink {
    pub events: Vec<DcosEvent>,
    pub cycles: Vec<CycleRecord>,
}

impl EventSink for CollectingSink {
    fn on_event(&mut self, event: DcosEvent) {
        self.events.push(event);
    }

    fn on_cycle(&mut self, cycle: CycleRecord) {
        self.cycles.push(cycle);
    }
}

/// Tallies event counts and keeps cycles, without materializing events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountingSink {
    pub counts: EventCounts,
    pub cycles: Vec<CycleRecord>,
}

impl EventSink for CountingSink {
    fn on_event(&mut self, event: DcosEvent) {
        self.counts.record(event.kind);
    }

    fn on_cycle(&mut self, cycle: CycleRecord) {
        self.cycles.push(cycle);
    }
}

#[derive(Debug, Clone, Copy)]
enum State {
    Warmup { max: f64, min: f64 },
    Trend(Trend),
}

#[derive(Debug, Clone, Copy)]
struct Trend {
    direction: Direction,
    /// Dc confirmation level of the current cycle.
    level: f64,
    /// Running max (Up) or min (Down) since the Dc.
    extremum: f64,
    overshoots: u64,
}

impl Trend {
    fn progress(&self, delta: f64) -> f64 {
        self.direction.sign() * (self.extremum - self.level) / delta
    }
}

/// Streaming DcOS extractor.
#[derive(Debug, Clone)]
pub struct Extractor {
    delta: f64,
    state: Option<State>,
    next_index: usize,
}

impl Extractor {
    pub fn new(delta: Threshold) -> Self {
        Self {
            delta: delta.value(),
            state: None,
            next_index: 0,
        }
    }

    /// Feeds the next log-price.
    pub fn push<S: EventSink>(&mut self, log_price: f64, sink: &mut S) -> Result<()> {
        let index = self.next_index;
        if !log_price.is_finite() {
            return Err(Error::NonFiniteLogPrice { index });
        }
        self.next_index += 1;
        let delta = self.delta;

        let state = match self.state {
            None => State::Warmup {
                max: log_price,
                min: log_price,
            },
            Some(State::Warmup { max, min }) => {
                if log_price - min >= delta {
                    self.open_cycle(Direction::Up, min + delta, log_price, index, None, sink)
                } else if max - log_price >= delta {
                    self.open_cycle(Direction::Down, max - delta, log_price, index, None, sink)
                } else {
                    State::Warmup {
                        max: max.max(log_price),
                        min: min.min(log_price),
                    }
                }
            }
            Some(State::Trend(mut trend)) => {
                let sign = trend.direction.sign();
                if sign * (log_price - trend.extremum) > 0.0 {
                    trend.extremum = log_price;
                    Self::emit_overshoots(&mut trend, delta, index, log_price, sink);
                    State::Trend(trend)
                } else if sign * (trend.extremum - log_price) >= delta {
                    let closed = CycleRecord {
                        overshoot_count: trend.overshoots,
                        overshoot_length_norm: trend.progress(delta),
                    };
                    sink.on_cycle(closed);
                    let level = trend.extremum - sign * delta;
                    self.open_cycle(
                        trend.direction.flip(),
                        level,
                        log_price,
                        index,
                        Some(closed.overshoot_length_norm),
                        sink,
                    )
                } else {
                    State::Trend(trend)
                }
            }
        };
        self.state = Some(state);
        Ok(())
    }

    fn open_cycle<S: EventSink>(
        &self,
        direction: Direction,
        level: f64,
        log_price: f64,
        index: usize,
        closed_length: Option<f64>,
        sink: &mut S,
    ) -> State {
        sink.on_event(DcosEvent {
            kind: EventKind::Dc,
            direction,
            tick_index: index,
            log_price,
            overshoot_length_norm: closed_length,
        });
        let mut trend = Trend {
            direction,
            level,
            extremum: log_price,
            overshoots: 0,
        };
        Self::emit_overshoots(&mut trend, self.delta, index, log_price, sink);
        State::Trend(trend)
    }

    fn emit_overshoots<S: EventSink>(
        trend: &mut Trend,
        delta: f64,
        index: usize,
        log_price: f64,
        sink: &mut S,
    ) {
        let reached = trend.progress(delta).floor();
        while (trend.overshoots as f64) < reached {
            trend.overshoots += 1;
            sink.on_event(DcosEvent {
                kind: EventKind::Os,
                direction: trend.direction,
                tick_index: index,
                log_price,
                overshoot_length_norm: None,
            });
        }
    }
}

/// Runs the extractor over a whole series.
pub fn extract_into<S: EventSink>(log_prices: &[f64], delta: Threshold, sink: &mut S) -> Result<()> {
    if log_prices.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut extractor = Extractor::new(delta);
    for &x in log_prices {
        extractor.push(x, sink)?;
    }
    Ok(())
}

pub fn extract_events(
    log_prices: &[f64],
    delta: Threshold,
) -> Result<(Vec<DcosEvent>, Vec<CycleRecord>)> {
    let mut sink = CollectingSink::default();
    extract_into(log_prices, delta, &mut sink)?;
    Ok((sink.events, sink.cycles))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventCounts {
    pub n_dc: u64,
    pub n_os: u64,
}

impl EventCounts {
    pub fn n_ev(&self) -> u64 {
        self.n_dc + self.n_os
    }

    fn record(&mut self, kind: EventKind) {
        match kind {
            EventKind::Dc => self.n_dc += 1,
            EventKind::Os => self.n_os += 1,
        }
    }
}

pub fn count_events(events: &[DcosEvent]) -> EventCounts {
    let mut counts = EventCounts::default();
    for e in events {
        counts.record(e.kind);
    }
    counts
}

/// Writes one row per event:
/// `delta,kind,direction,tick_index,log_price,overshoot_length_norm`.
pub fn write_event_log<W: std::io::Write>(
    out: &mut W,
    delta: Threshold,
    events: &[DcosEvent],
    header: bool,
) -> std::io::Result<()> {
    if header {
        writeln!(out, "delta,kind,direction,tick_index,log_price,overshoot_length_norm")?;
    }
    for e in events {
        let len = e
            .overshoot_length_norm
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            delta.value(),
            e.kind.as_str(),
            e.direction.as_str(),
            e.tick_index,
            e.log_price,
            len
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(d: f64) -> Threshold {
        Threshold::new(d).unwrap()
    }

    #[test]
    fn threshold_validation() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(-1e-3).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
        assert!(Threshold::new(1e-3).is_ok());
    }

    #[test]
    fn flat_series_has_no_events() {
        let (ev, cy) = extract_events(&[0.3; 100], th(1e-4)).unwrap();
        assert!(ev.is_empty());
        assert!(cy.is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(extract_events(&[], th(0.1)), Err(Error::EmptySeries)));
        assert!(matches!(
            extract_events(&[0.0, f64::NAN], th(0.1)),
            Err(Error::NonFiniteLogPrice { index: 1 })
        ));
    }

    /// Hand trace, delta = 0.01, log-prices [0, 0.02, 0.00995]:
    /// tick 1: 0.02 - min(0) >= 0.01 -> Dc(Up), level 0.01; (0.02-0.01)/0.01 = 1 -> Os(Up).
    /// tick 2: max(0.02) - 0.00995 = 0.01005 >= 0.01 -> Dc(Down) closing the Up
    ///         cycle with K = 1 and x/delta = (0.02 - 0.01)/0.01 = 1.
    #[test]
    fn hand_traced_three_events() {
        let lp = [0.0, 0.02, 0.009_950_330_853_168_092];
        let (ev, cy) = extract_events(&lp, th(0.01)).unwrap();
        let summary: Vec<_> = ev.iter().map(|e| (e.kind, e.direction, e.tick_index)).collect();
        assert_eq!(
            summary,
            vec![
                (EventKind::Dc, Direction::Up, 1),
                (EventKind::Os, Direction::Up, 1),
                (EventKind::Dc, Direction::Down, 2),
            ]
        );
        assert_eq!(cy.len(), 1);
        assert_eq!(cy[0].overshoot_count, 1);
        assert!((cy[0].overshoot_length_norm - 1.0).abs() < 1e-12);
        assert_eq!(ev[2].overshoot_length_norm, Some(cy[0].overshoot_length_norm));
        assert_eq!(ev[0].overshoot_length_norm, None);

        let c = count_events(&ev);
        assert_eq!((c.n_dc, c.n_os, c.n_ev()), (2, 1, 3));
    }

    #[test]
    fn fine_ramp_gives_one_dc_and_nine_overshoots() {
        // total rise 10 * delta in 10_000 steps; use exact binary fractions
        let delta = 1.0 / 1024.0;
        let lp: Vec<f64> = (0..=10_240).map(|i| i as f64 / (1024.0 * 1024.0)).collect();
        let (ev, cy) = extract_events(&lp, th(delta)).unwrap();
        let c = count_events(&ev);
        assert_eq!((c.n_dc, c.n_os), (1, 9));
        assert!(cy.is_empty());
        assert!(ev.iter().all(|e| e.direction == Direction::Up));
    }

    #[test]
    fn big_jump_emits_overshoots_at_same_index() {
        let (ev, _) = extract_events(&[0.0, 0.35], th(0.1)).unwrap();
        assert_eq!(ev.len(), 3);
        assert!(ev.iter().all(|e| e.tick_index == 1));
        assert_eq!(ev[0].kind, EventKind::Dc);
    }

    #[test]
    fn first_dc_can_be_downward() {
        let (ev, _) = extract_events(&[0.0, 0.005, -0.006], th(0.01)).unwrap();
        assert_eq!(ev[0].kind, EventKind::Dc);
        assert_eq!(ev[0].direction, Direction::Down);
        assert_eq!(ev[0].tick_index, 2);
    }

    #[test]
    fn event_log_format() {
        let lp = [0.0, 0.02, 0.009_950_330_853_168_092];
        let (ev, _) = extract_events(&lp, th(0.01)).unwrap();
        let mut buf = Vec::new();
        write_event_log(&mut buf, th(0.01), &ev, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "delta,kind,direction,tick_index,log_price,overshoot_length_norm");
        assert_eq!(lines[1], "0.01,dc,up,1,0.02,");
        assert!(lines[3].starts_with("0.01,dc,down,2,"));
        assert!(lines[3].ends_with(",1"));
    }
}
