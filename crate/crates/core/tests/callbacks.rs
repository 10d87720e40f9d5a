mod common;

use std::cell::Cell;

use common::{Counting, Quadratic};
use ndarray::{array, Array2};
use optkit::callbacks::{
    parse_progress_line, EarlyStopping, MaxTime, ProgressPrinter, TraceRecorder,
};
use optkit::problems::{generate_noisy_linear, LinearRegression, Rosenbrock};
use optkit::{
    Callback, Decision, Event, GdConfig, GradientDescent, Lbfgs, SaConfig, Sgd, SgdConfig,
    SimulatedAnnealing, TerminationReason,
};

fn gd(step: f64, iterations: usize) -> GradientDescent {
    GradientDescent::new(GdConfig {
        step_size: step,
        max_iterations: iterations,
        min_gradient_norm: 0.0,
        min_objective_improvement: 0.0,
    })
}

/// Returns Terminate at `StepTaken(k)` and records the objective-call total
/// seen at that moment.
fn stop_at<'a>(
    k: usize,
    calls: &'a dyn Fn() -> usize,
    seen: &'a Cell<Option<usize>>,
) -> impl FnMut(&Event<'_, f64>) -> Decision + 'a {
    move |e| match e {
        Event::StepTaken { iteration, .. } if *iteration == k => {
            seen.set(Some(calls()));
            Decision::Terminate
        }
        _ => Decision::Continue,
    }
}

#[test]
fn terminate_at_step_k_under_gradient_descent() {
    let f = Counting::new(Quadratic::origin(2));
    let seen = Cell::new(None);
    let total = || f.total();
    let mut cb = stop_at(4, &total, &seen);
    let mut x = array![[1.0], [2.0]];
    let r = gd(0.1, 100).optimize(&f, &mut x, &mut [&mut cb]).unwrap();
    assert_eq!(r.iterations, 4);
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert_eq!(seen.get(), Some(f.total()));
}

#[test]
fn terminate_at_step_k_under_lbfgs() {
    let f = Counting::new(Rosenbrock);
    let seen = Cell::new(None);
    let total = || f.total();
    let mut cb = stop_at(7, &total, &seen);
    let mut x = array![[-1.2], [1.0]];
    let r = Lbfgs::default()
        .optimize(&f, &mut x, &mut [&mut cb])
        .unwrap();
    assert_eq!(r.iterations, 7);
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert_eq!(seen.get(), Some(f.total()));
    assert_eq!(r.evaluate_calls + r.gradient_calls, f.total());
}

#[test]
fn terminate_at_step_k_under_simulated_annealing() {
    let f = Counting::new(Rosenbrock);
    let seen = Cell::new(None);
    let total = || f.total();
    let mut cb = stop_at(25, &total, &seen);
    let mut x = array![[-1.2], [1.0]];
    let r = SimulatedAnnealing::new(SaConfig::default())
        .optimize(&f, &mut x, &mut [&mut cb])
        .unwrap();
    assert_eq!(r.iterations, 25);
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert_eq!(seen.get(), Some(f.total()));
}

#[test]
fn terminate_at_step_k_under_sgd() {
    let data = generate_noisy_linear::<f64>(3, 50, 1.0, 3);
    let f = LinearRegression::new(data.predictors, data.responses).unwrap();
    let mut calls_at_stop = None;
    let mut calls = Vec::new();
    let mut cb = |e: &Event<'_, f64>| match e {
        Event::StepTaken { iteration: 6, .. } => {
            calls_at_stop = Some(calls.len());
            Decision::Terminate
        }
        Event::EvaluateCalled { .. } | Event::GradientCalled { .. } => {
            calls.push(());
            Decision::Continue
        }
        _ => Decision::Continue,
    };
    let sgd = Sgd::new(SgdConfig {
        batch_size: 5,
        tolerance: 0.0,
        ..SgdConfig::default()
    });
    let mut x = Array2::zeros((3, 1));
    let r = sgd
        .optimize(&f.separable(), &mut x, &mut [&mut cb])
        .unwrap();
    assert_eq!(r.iterations, 6);
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert_eq!(calls_at_stop, Some(calls.len()));
    // six batches of five parts, each a fused evaluate and gradient
    assert_eq!(r.evaluate_calls, 30);
    assert_eq!(r.gradient_calls, 30);
}

#[test]
fn terminate_at_begin_makes_no_objective_call() {
    let f = Counting::new(Quadratic::origin(1));
    let mut cb = |e: &Event<'_, f64>| match e {
        Event::BeginOptimization => Decision::Terminate,
        _ => Decision::Continue,
    };
    let mut x = array![[1.0]];
    let r = Lbfgs::default()
        .optimize(&f, &mut x, &mut [&mut cb])
        .unwrap();
    assert_eq!(f.total(), 0);
    assert_eq!(r.iterations, 0);
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert!(r.final_objective.is_nan());
}

#[test]
fn every_callback_sees_the_terminating_event() {
    let mut a = 0;
    let mut b = 0;
    let mut first = |e: &Event<'_, f64>| {
        if matches!(e, Event::StepTaken { .. }) {
            a += 1;
        }
        Decision::Continue
    };
    let mut stopper = |e: &Event<'_, f64>| match e {
        Event::StepTaken { iteration: 2, .. } => Decision::Terminate,
        _ => Decision::Continue,
    };
    let mut last = |e: &Event<'_, f64>| {
        if matches!(e, Event::StepTaken { .. }) {
            b += 1;
        }
        Decision::Continue
    };
    let mut x = array![[1.0]];
    gd(0.1, 10)
        .optimize(
            &Quadratic::origin(1),
            &mut x,
            &mut [&mut first, &mut stopper, &mut last],
        )
        .unwrap();
    assert_eq!((a, b), (2, 2));
}

#[test]
fn trace_of_five_gd_steps() {
    let alpha = 0.1;
    let mut trace = TraceRecorder::new();
    let mut x = array![[1.0]];
    gd(alpha, 5)
        .optimize(&Quadratic::origin(1), &mut x, &mut [&mut trace])
        .unwrap();
    assert_eq!(trace.trace().len(), 5);
    let (k, first) = trace.trace()[0];
    assert_eq!(k, 1);
    let scale = (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha);
    assert!((first - scale).abs() < 1e-15);
    let values: Vec<f64> = trace.objectives().collect();
    for w in values.windows(2) {
        assert!((w[1] / w[0] - scale).abs() < 1e-12);
    }
}

#[test]
fn early_stopping_on_scripted_stream() {
    let iterate = array![[0.0]];
    let feed = |stop: &mut EarlyStopping, stream: &[f64]| -> Option<usize> {
        stream.iter().enumerate().find_map(|(i, &v)| {
            let event = Event::StepTaken {
                iteration: i + 1,
                objective: v,
                gradient_norm: None,
                iterate: &iterate,
            };
            match Callback::<f64>::on_event(stop, &event).unwrap() {
                Decision::Terminate => Some(i),
                Decision::Continue => None,
            }
        })
    };
    assert_eq!(
        feed(
            &mut EarlyStopping::new(3, 0.0),
            &[5.0, 4.0, 3.0, 3.0, 3.0, 3.0]
        ),
        Some(5)
    );
    let decreasing: Vec<f64> = (0..100).map(|i| 100.0 - i as f64).collect();
    assert_eq!(feed(&mut EarlyStopping::new(3, 0.0), &decreasing), None);
    assert_eq!(
        feed(&mut EarlyStopping::new(2, 0.5), &[5.0, 4.8, 4.6]),
        Some(2)
    );
}

#[test]
fn early_stopping_ends_an_optimizer_run() {
    // GD on x^2 with step 0.1 gives objectives 0.64^k, whose improvements
    // shrink below min_delta after a few steps
    let (patience, min_delta) = (2, 0.05);
    let mut expected = None;
    let (mut x, mut best, mut stale) = (1.0_f64, f64::INFINITY, 0);
    for k in 1..=100 {
        x -= 0.1 * (2.0 * x);
        let v = x * x;
        if v < best - min_delta {
            best = v;
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                expected = Some(k);
                break;
            }
        }
    }
    let mut stop = EarlyStopping::new(patience, min_delta);
    let mut x = array![[1.0]];
    let r = gd(0.1, 100)
        .optimize(&Quadratic::origin(1), &mut x, &mut [&mut stop])
        .unwrap();
    assert_eq!(r.termination, TerminationReason::CallbackRequested);
    assert_eq!(Some(r.iterations), expected);
}

#[test]
fn progress_lines_round_trip() {
    let mut printer = ProgressPrinter::new(Vec::new(), 10);
    let mut x = array![[1.0]];
    gd(0.1, 25)
        .optimize(&Quadratic::origin(1), &mut x, &mut [&mut printer])
        .unwrap();
    let text = String::from_utf8(printer.into_inner()).unwrap();
    let lines: Vec<_> = text
        .lines()
        .map(|l| parse_progress_line(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].iteration, 10);
    assert_eq!(lines[1].iteration, 20);
    let mut v = 1.0_f64;
    for _ in 0..10 {
        v -= 0.1 * (2.0 * v);
    }
    assert_eq!(lines[0].objective, v * v);
}

#[test]
fn max_time_short_and_long_limits() {
    let mut short = MaxTime::new(1e-4);
    let mut x = array![[-1.2], [1.0]];
    let sa = SimulatedAnnealing::new(SaConfig {
        max_iterations: 100_000_000,
        ..SaConfig::default()
    });
    let r = sa.optimize(&Rosenbrock, &mut x, &mut [&mut short]).unwrap();
    assert_eq!(r.termination, TerminationReason::CallbackRequested);

    let mut long = MaxTime::new(3600.0);
    let mut x = array![[1.0]];
    let r = gd(0.1, 5)
        .optimize(&Quadratic::origin(1), &mut x, &mut [&mut long])
        .unwrap();
    assert_eq!(r.termination, TerminationReason::MaxIterations);
    assert_eq!(r.iterations, 5);
}
