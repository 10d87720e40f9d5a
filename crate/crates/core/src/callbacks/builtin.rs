use std::io::Write;
use std::time::{Duration, Instant};

use super::{Callback, CallbackError, Decision, Event};
use crate::element::Element;

/// Stops once the best objective has not improved by more than `min_delta`
/// for `patience` consecutive observations.
///
/// Observations are the objectives of `StepTaken` and the means of
/// `EndEpoch` events.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    min_delta: f64,
    best: f64,
    stale: usize,
}

impl EarlyStopping {
    /// # Panics
    /// If `patience` is zero.
    pub fn new(patience: usize, min_delta: f64) -> Self {
        assert!(patience >= 1, "patience must be at least 1");
        Self {
            patience,
            min_delta,
            best: f64::INFINITY,
            stale: 0,
        }
    }

    /// Feeds one objective value; returns the resulting decision.
    pub fn observe(&mut self, objective: f64) -> Decision {
        if objective < self.best - self.min_delta {
            self.best = objective;
            self.stale = 0;
            Decision::Continue
        } else {
            self.stale += 1;
            if self.stale >= self.patience {
                Decision::Terminate
            } else {
                Decision::Continue
            }
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

impl<T: Element> Callback<T> for EarlyStopping {
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError> {
        Ok(match *event {
            Event::StepTaken { objective, .. } => self.observe(objective.as_f64()),
            Event::EndEpoch { mean_objective, .. } => self.observe(mean_objective.as_f64()),
            _ => Decision::Continue,
        })
    }
}

/// Writes `iter=<k> f=<objective> [g=<gradnorm>]` every `period` steps.
#[derive(Debug)]
pub struct ProgressPrinter<W: Write> {
    out: W,
    period: usize,
    steps: usize,
}

impl<W: Write> ProgressPrinter<W> {
    /// # Panics
    /// If `period` is zero.
    pub fn new(out: W, period: usize) -> Self {
        assert!(period >= 1, "period must be at least 1");
        Self {
            out,
            period,
            steps: 0,
        }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<T: Element, W: Write> Callback<T> for ProgressPrinter<W> {
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError> {
        if let Event::StepTaken {
            iteration,
            objective,
            gradient_norm,
            ..
        } = *event
        {
            self.steps += 1;
            if self.steps.is_multiple_of(self.period) {
                match gradient_norm {
                    Some(g) => writeln!(self.out, "iter={iteration} f={objective} g={g}")?,
                    None => writeln!(self.out, "iter={iteration} f={objective}")?,
                }
            }
        }
        Ok(Decision::Continue)
    }
}

/// One parsed progress line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressLine {
    pub iteration: usize,
    pub objective: f64,
    pub gradient_norm: Option<f64>,
}

/// Parses a line written by [`ProgressPrinter`].
pub fn parse_progress_line(line: &str) -> Option<ProgressLine> {
    let mut fields = line.split_whitespace();
    let iteration = fields.next()?.strip_prefix("iter=")?.parse().ok()?;
    let objective = fields.next()?.strip_prefix("f=")?.parse().ok()?;
    let gradient_norm = match fields.next() {
        Some(g) => Some(g.strip_prefix("g=")?.parse().ok()?),
        None => None,
    };
    if fields.next().is_some() {
        return None;
    }
    Some(ProgressLine {
        iteration,
        objective,
        gradient_norm,
    })
}

/// Records `(iteration, objective)` for every step.
#[derive(Debug, Clone, Default)]
pub struct TraceRecorder {
    trace: Vec<(usize, f64)>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trace(&self) -> &[(usize, f64)] {
        &self.trace
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.trace.iter().map(|&(_, f)| f)
    }
}

impl<T: Element> Callback<T> for TraceRecorder {
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError> {
        if let Event::StepTaken {
            iteration,
            objective,
            ..
        } = *event
        {
            self.trace.push((iteration, objective.as_f64()));
        }
        Ok(Decision::Continue)
    }
}

/// Terminates at the first event after a wall-clock limit.
///
/// The clock starts at `BeginOptimization` (or at the first event seen).
#[derive(Debug, Clone)]
pub struct MaxTime {
    limit: Duration,
    started: Option<Instant>,
}

impl MaxTime {
    /// # Panics
    /// If `limit_seconds` is not positive.
    pub fn new(limit_seconds: f64) -> Self {
        assert!(limit_seconds > 0.0, "time limit must be positive");
        Self {
            limit: Duration::from_secs_f64(limit_seconds),
            started: None,
        }
    }
}

impl<T: Element> Callback<T> for MaxTime {
    fn on_event(&mut self, event: &Event<'_, T>) -> Result<Decision, CallbackError> {
        if matches!(event, Event::BeginOptimization) {
            self.started = Some(Instant::now());
            return Ok(Decision::Continue);
        }
        let started = *self.started.get_or_insert_with(Instant::now);
        Ok(if started.elapsed() > self.limit {
            Decision::Terminate
        } else {
            Decision::Continue
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn step(iteration: usize, objective: f64, x: &Array2<f64>) -> Event<'_, f64> {
        Event::StepTaken {
            iteration,
            objective,
            gradient_norm: None,
            iterate: x,
        }
    }

    #[test]
    fn early_stopping_plateau() {
        let mut es = EarlyStopping::new(3, 0.0);
        let decisions: Vec<_> = [5.0, 4.0, 3.0, 3.0, 3.0, 3.0]
            .into_iter()
            .map(|f| es.observe(f))
            .collect();
        assert_eq!(
            decisions.iter().position(|&d| d == Decision::Terminate),
            Some(5)
        );
    }

    #[test]
    fn early_stopping_never_fires_on_decreasing_stream() {
        let mut es = EarlyStopping::new(1, 0.0);
        assert!((0..1000).all(|k| es.observe(-(k as f64)) == Decision::Continue));
    }

    #[test]
    fn early_stopping_min_delta() {
        // best stays 5.0: 4.8 and 4.6 are both within 0.5 of it
        let mut es = EarlyStopping::new(2, 0.5);
        assert_eq!(es.observe(5.0), Decision::Continue);
        assert_eq!(es.observe(4.8), Decision::Continue);
        assert_eq!(es.observe(4.6), Decision::Terminate);
        assert_eq!(es.best(), 5.0);
    }

    #[test]
    fn printer_period() {
        let x = Array2::zeros((1, 1));
        let mut p = ProgressPrinter::new(Vec::new(), 10);
        for k in 1..=25 {
            Callback::<f64>::on_event(&mut p, &step(k, 1.0, &x)).unwrap();
        }
        let text = String::from_utf8(p.into_inner()).unwrap();
        let iters: Vec<_> = text
            .lines()
            .map(|l| parse_progress_line(l).unwrap().iteration)
            .collect();
        assert_eq!(iters, vec![10, 20]);
    }

    #[test]
    fn progress_line_round_trip() {
        let x = Array2::zeros((1, 1));
        let mut p = ProgressPrinter::new(Vec::new(), 1);
        let value = 0.1_f64 + 0.2;
        Callback::<f64>::on_event(
            &mut p,
            &Event::StepTaken {
                iteration: 7,
                objective: value,
                gradient_norm: Some(1.5e-9),
                iterate: &x,
            },
        )
        .unwrap();
        Callback::<f64>::on_event(&mut p, &step(8, -2.0, &x)).unwrap();
        let text = String::from_utf8(p.into_inner()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            parse_progress_line(lines[0]),
            Some(ProgressLine {
                iteration: 7,
                objective: value,
                gradient_norm: Some(1.5e-9)
            })
        );
        assert_eq!(
            parse_progress_line(lines[1]),
            Some(ProgressLine {
                iteration: 8,
                objective: -2.0,
                gradient_norm: None
            })
        );
        assert_eq!(parse_progress_line("iteration 3"), None);
    }

    struct BrokenPipe;

    impl Write for BrokenPipe {
        fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
            Err(std::io::ErrorKind::BrokenPipe.into())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn printer_reports_write_failure() {
        let x = Array2::zeros((1, 1));
        let mut p = ProgressPrinter::new(BrokenPipe, 1);
        assert!(Callback::<f64>::on_event(&mut p, &step(1, 0.0, &x)).is_err());
    }

    #[test]
    fn max_time_long_limit_never_fires() {
        let x = Array2::zeros((1, 1));
        let mut t = MaxTime::new(3600.0);
        Callback::<f64>::on_event(&mut t, &Event::BeginOptimization).unwrap();
        for k in 1..=5 {
            assert_eq!(
                Callback::<f64>::on_event(&mut t, &step(k, 0.0, &x)).unwrap(),
                Decision::Continue
            );
        }
    }
}
