//! Acceptance suite. Runs without the test harness so every criterion prints
//! one PASS/FAIL line; exits non-zero if any criterion fails.

use std::convert::Infallible;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use encoder_lens_cli::args::HyperArgs;
use encoder_lens_cli::sweep::sweep;
use encoder_lens_core::analysis::{comparison_map, fit_pca, separation_score};
use encoder_lens_core::control::{control_channel, ControlListener};
use encoder_lens_core::datasets::{self, dataset_ids};
use encoder_lens_core::encoding::{encoder_catalog, find_encoder};
use encoder_lens_core::quantum::{Amplitude, DensityMatrix, StateVector};
use encoder_lens_core::training::{
    forward, loss, parameter_shift_grad, train, AnsatzParams, EpochRecord, TrainingConfig, NUM_PARAMS,
};
use encoder_lens_service::{serve, ServiceConfig};
use futures::StreamExt;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run_to_end(config: &TrainingConfig) -> Vec<EpochRecord> {
    let mut out = Vec::new();
    train(config, &mut ControlListener::detached(), |r| {
        out.push(r.clone());
        Ok::<_, Infallible>(())
    })
    .unwrap();
    out
}

fn final_accuracy(dataset: &str, encoder: &str, seed: u64) -> f64 {
    let mut config = TrainingConfig::new(dataset, encoder);
    config.seed = seed;
    run_to_end(&config).last().unwrap().accuracy
}

fn c1_expectation_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 1.0).unwrap();
    // Z on qubit 0 (the most significant index bit), identity on qubit 1
    let z0: Vec<Amplitude> = (0..16)
        .map(|k| {
            let (r, c) = (k / 4, k % 4);
            let v = if r != c {
                0.0
            } else if r < 2 {
                1.0
            } else {
                -1.0
            };
            Amplitude::new(v, 0.0)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let amps = (0..4).map(|_| Amplitude::new(normal.sample(&mut rng), normal.sample(&mut rng))).collect();
        let state = StateVector::normalize(2, amps).map_err(|e| e.to_string())?;
        let traced = DensityMatrix::from_state(&state).trace_with(&z0).map_err(|e| e.to_string())?;
        worst = worst.max((state.expectation_z0() - traced.re).abs()).max(traced.im.abs());
    }
    let elapsed = started.elapsed();
    check(worst <= 1e-10, format!("max deviation {worst:e}"))?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("max |<Z0> - Tr(rho Z0)| = {worst:.1e} over 1000 states in {elapsed:.0?}"))
}

fn c2_bell_fixture() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Amplitude::new(0.0, 0.0);
    let state = StateVector::from_amplitudes(2, vec![Amplitude::new(h, 0.0), zero, zero, Amplitude::new(h, 0.0)])
        .map_err(|e| e.to_string())?;
    let rho = DensityMatrix::from_state(&state);
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let expected = if (r == 0 || r == 3) && (c == 0 || c == 3) { 0.5 } else { 0.0 };
            worst = worst.max((rho.get(r, c) - Amplitude::new(expected, 0.0)).norm());
        }
    }
    let z = state.expectation_z0();
    check(worst <= 1e-12, format!("entry deviation {worst:e}"))?;
    check(z.abs() <= 1e-12, format!("<Z0> = {z:e}"))?;
    Ok(format!("entry deviation {worst:.1e}, <Z0> = {z:.1e}"))
}

fn c3_gradient_exactness() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ids: Vec<&str> = dataset_ids().collect();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let encoder = &encoder_catalog()[rng.random_range(0..encoder_catalog().len())];
        let grid = datasets::generate(ids[rng.random_range(0..ids.len())], 4).unwrap();
        let values: Vec<f64> = (0..NUM_PARAMS).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let params = AnsatzParams::new(&values).unwrap();
        let mse = |p: &AnsatzParams| {
            let out: Vec<f64> = grid.points().iter().map(|pt| forward(encoder, p, pt.features()).unwrap()).collect();
            loss(&out, &grid.labels()).unwrap()
        };
        let grad = parameter_shift_grad(encoder, &params, &grid).map_err(|e| e.to_string())?;
        for k in 0..NUM_PARAMS {
            let fd = (mse(&params.with(k, values[k] + h)) - mse(&params.with(k, values[k] - h))) / (2.0 * h);
            worst = worst.max((grad[k] - fd).abs());
        }
    }
    let elapsed = started.elapsed();
    check(worst <= 1e-5, format!("max deviation {worst:e}"))?;
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("max |shift - fd| = {worst:.1e} over 20 configs in {elapsed:.0?}"))
}

fn c4_matched_accuracy() -> Outcome {
    let started = Instant::now();
    let acc = final_accuracy("D1-vstripes", "E01", 7);
    let elapsed = started.elapsed();
    check(acc >= 0.90, format!("accuracy {acc}"))?;
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("D1-vstripes + E01 accuracy {acc:.4} in {elapsed:.0?}"))
}

fn c5_mismatch_gap() -> Outcome {
    let matched = final_accuracy("D1-vstripes", "E01", 7);
    let accs: Vec<f64> = [7, 11, 13].iter().map(|&s| final_accuracy("D3-corner-circle", "E01", s)).collect();
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let gap = matched - mean;
    check(gap >= 0.15, format!("gap {gap:.4} (matched {matched:.4}, mismatched {mean:.4})"))?;
    Ok(format!("matched {matched:.4} vs D3-corner-circle mean {mean:.4} {accs:?}: gap {:.1} points", gap * 100.0))
}

fn c6_separation_ordering() -> Outcome {
    let e01 = find_encoder("E01").unwrap();
    let score = |d: &str| -> Result<f64, String> {
        let grid = datasets::generate(d, 16).map_err(|e| e.to_string())?;
        let map = comparison_map(e01, &grid).map_err(|e| e.to_string())?;
        separation_score(&map.points).map_err(|e| e.to_string())
    };
    let (matched, mismatched) = (score("D1-vstripes")?, score("D3-corner-circle")?);
    check(matched > mismatched, format!("{matched} <= {mismatched}"))?;
    Ok(format!("separation D1-vstripes {matched:.4} > D3-corner-circle {mismatched:.4}"))
}

fn c7_pca_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let scales: Vec<f64> = (0..32).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let cloud: Vec<Vec<f64>> =
            (0..60).map(|_| scales.iter().map(|s| s * normal.sample(&mut rng)).collect()).collect();
        let model = fit_pca(&cloud).map_err(|e| e.to_string())?;

        let n = cloud.len();
        let data = DMatrix::from_fn(n, 32, |i, j| cloud[i][j]);
        let mean = data.row_mean();
        let centered = DMatrix::from_fn(n, 32, |i, j| data[(i, j)] - mean[j]);
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        let mut eig: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        worst =
            worst.max((model.explained_variance[0] - eig[0]).abs()).max((model.explained_variance[1] - eig[1]).abs());
    }
    check(worst <= 1e-8, format!("eigenvalue deviation {worst:e}"))?;

    let flat = vec![vec![0.25; 32]; 16];
    let model = fit_pca(&flat).map_err(|e| e.to_string())?;
    check(model.degenerate, "identical vectors not flagged degenerate")?;
    check(model.explained_variance == [0.0, 0.0], "degenerate variances are not zero")?;
    check(model.project(&flat[0]) == (0.0, 0.0), "degenerate projection is not the origin")?;
    Ok(format!("max eigenvalue deviation {worst:.1e} over 10 clouds; degenerate input projects to origin"))
}

fn c8_pause_resume_determinism() -> Outcome {
    let mut config = TrainingConfig::new("D3-corner-circle", "E04");
    config.epochs = 50;
    let reference = run_to_end(&config);

    let (handle, mut listener) = control_channel();
    let mut records = Vec::new();
    let mut resumers = Vec::new();
    let outcome = train(&config, &mut listener, |r| {
        records.push(r.clone());
        if r.epoch == 10 || r.epoch == 30 {
            handle.pause();
            let h = handle.clone();
            resumers.push(thread::spawn(move || {
                thread::sleep(Duration::from_millis(50));
                h.resume();
            }));
        }
        Ok::<_, Infallible>(())
    })
    .map_err(|e| e.to_string())?;
    for r in resumers {
        r.join().unwrap();
    }
    check(outcome.completed, "paused run did not complete")?;
    check(records.len() == 50, format!("{} records", records.len()))?;
    let identical = records.iter().zip(&reference).all(|(a, b)| {
        a.epoch == b.epoch
            && a.loss.to_bits() == b.loss.to_bits()
            && a.accuracy.to_bits() == b.accuracy.to_bits()
            && a.params_snapshot
                .values()
                .iter()
                .zip(b.params_snapshot.values())
                .all(|(x, y)| x.to_bits() == y.to_bits())
            && a.trained_map.values().iter().zip(b.trained_map.values()).all(|(x, y)| x.to_bits() == y.to_bits())
    });
    check(identical, "records differ from the uninterrupted run")?;
    Ok("50 records bit-identical after pauses at epochs 10 and 30".into())
}

fn c9_sweep_completeness() -> Outcome {
    let hyper = HyperArgs { epochs: 100, learning_rate: 0.5, seed: 7, resolution: 16, target_accuracy: None };
    let started = Instant::now();
    let first = sweep(&hyper, None).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let second = sweep(&hyper, None).map_err(|e| e.to_string())?;
    let (a, b) = (first.to_csv().map_err(|e| e.to_string())?, second.to_csv().map_err(|e| e.to_string())?);
    check(first.rows.len() == 60, format!("{} rows", first.rows.len()))?;
    check(a == b, "CSV bytes differ between runs")?;
    check(elapsed < Duration::from_secs(60), format!("sweep took {elapsed:?}"))?;
    Ok(format!("60 rows, identical CSV ({} bytes), sweep in {elapsed:.1?}", a.len()))
}

struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    async fn send(&self, req: reqwest::RequestBuilder) -> (u16, Value) {
        let resp = req.send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap_or(Value::Null))
    }

    async fn create(&self, body: Value) -> String {
        let (status, body) = self.send(self.http.post(format!("{}/api/sessions", self.base)).json(&body)).await;
        assert_eq!(status, 201);
        body["session_id"].as_str().unwrap().to_string()
    }

    async fn control(&self, id: &str, action: &str) -> (u16, Value) {
        let url = format!("{}/api/sessions/{id}/control", self.base);
        self.send(self.http.post(url).json(&json!({ "action": action }))).await
    }

    async fn summary(&self, id: &str) -> Value {
        self.send(self.http.get(format!("{}/api/sessions/{id}", self.base))).await.1
    }

    async fn wait_until(&self, id: &str, pred: impl Fn(&Value) -> bool) {
        for _ in 0..4000 {
            if pred(&self.summary(id).await) {
                return;
            }
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
        panic!("session {id} never reached the expected state");
    }

    async fn events(&self, id: &str) -> Events {
        let resp = self.http.get(format!("{}/api/sessions/{id}/events", self.base)).send().await.unwrap();
        Events { stream: Box::pin(resp.bytes_stream()), buffer: String::new() }
    }
}

struct Events {
    stream: std::pin::Pin<Box<dyn futures::Stream<Item = reqwest::Result<bytes::Bytes>> + Send>>,
    buffer: String,
}

impl Events {
    async fn next(&mut self, wait: Duration) -> Option<(String, Value)> {
        tokio::time::timeout(wait, async {
            loop {
                if let Some(pos) = self.buffer.find("\n\n") {
                    let block: String = self.buffer.drain(..pos + 2).collect();
                    let name = block.lines().find_map(|l| l.strip_prefix("event:")).map(|s| s.trim().to_string());
                    let data: String =
                        block.lines().filter_map(|l| l.strip_prefix("data:")).map(str::trim_start).collect();
                    if let Some(name) = name {
                        return Some((name, serde_json::from_str(&data).unwrap()));
                    }
                    continue;
                }
                let chunk = self.stream.next().await?.ok()?;
                self.buffer.push_str(std::str::from_utf8(&chunk).unwrap());
            }
        })
        .await
        .ok()
        .flatten()
    }
}

async fn session_protocol() -> Outcome {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(serve(listener, ServiceConfig::default(), async {
        let _ = stop_rx.await;
    }));
    let client = Client { base, http: reqwest::Client::new() };
    let short = json!({ "dataset_id": "D1-vstripes", "encoder_id": "E01", "epochs": 3, "resolution": 8 });
    let long = json!({ "dataset_id": "D5-ring", "encoder_id": "E10", "epochs": 10000, "resolution": 64 });

    // (a) every state × action pair
    let table = [
        ("created", ["running", "", "", ""]),
        ("running", ["", "paused", "running", "stopped"]),
        ("paused", ["", "paused", "running", "stopped"]),
        ("stopped", ["", "", "", ""]),
        ("finished", ["", "", "", ""]),
    ];
    let mut illegal = 0;
    for (state, outcomes) in table {
        for (action, expected) in ["start", "pause", "resume", "stop"].into_iter().zip(outcomes) {
            let id = match state {
                "created" => client.create(short.clone()).await,
                "finished" => {
                    let id = client.create(short.clone()).await;
                    client.control(&id, "start").await;
                    client.wait_until(&id, |s| s["run_state"] == "finished").await;
                    id
                }
                _ => {
                    let id = client.create(long.clone()).await;
                    client.control(&id, "start").await;
                    match state {
                        "paused" => client.control(&id, "pause").await,
                        "stopped" => client.control(&id, "stop").await,
                        _ => (200, Value::Null),
                    };
                    id
                }
            };
            let before = client.summary(&id).await;
            let (status, body) = client.control(&id, action).await;
            let after = client.summary(&id).await;
            if expected.is_empty() {
                illegal += 1;
                check(status == 409, format!("{state} + {action} returned {status}"))?;
                check(after["run_state"] == state, format!("{state} + {action} changed the state"))?;
                if state != "running" {
                    check(
                        after["current_epoch"] == before["current_epoch"],
                        format!("{state} + {action} moved the epoch"),
                    )?;
                }
            } else {
                check(status == 200, format!("{state} + {action} returned {status}"))?;
                check(body["run_state"] == expected, format!("{state} + {action} gave {}", body["run_state"]))?;
            }
            if matches!(after["run_state"].as_str(), Some("running" | "paused")) {
                client.control(&id, "stop").await;
            }
        }
    }

    // (b) one event per epoch and a single terminal event
    let id = client.create(json!({ "dataset_id": "D1-vstripes", "encoder_id": "E01", "epochs": 100 })).await;
    let mut events = client.events(&id).await;
    client.control(&id, "start").await;
    let mut epochs = Vec::new();
    let mut terminal = 0;
    while let Some((name, data)) = events.next(Duration::from_secs(30)).await {
        match name.as_str() {
            "epoch" => epochs.push(data["epoch"].as_u64().unwrap()),
            "done" => terminal += 1,
            other => return Err(format!("unexpected event {other}")),
        }
    }
    check(epochs == (1..=100).collect::<Vec<_>>(), format!("{} epoch events", epochs.len()))?;
    check(terminal == 1, format!("{terminal} terminal events"))?;

    // (c) late connect at epoch k
    let id = client.create(json!({ "dataset_id": "D2-checkerboard", "encoder_id": "E05", "epochs": 60 })).await;
    client.control(&id, "start").await;
    client.wait_until(&id, |s| s["current_epoch"].as_u64().unwrap() >= 5).await;
    client.control(&id, "pause").await;
    let k = client.summary(&id).await["current_epoch"].as_u64().unwrap();
    let mut events = client.events(&id).await;
    let mut seen = Vec::new();
    while seen.len() < k as usize {
        let (_, data) = events.next(Duration::from_secs(5)).await.ok_or("backlog incomplete")?;
        seen.push(data["epoch"].as_u64().unwrap());
    }
    client.control(&id, "resume").await;
    while let Some((name, data)) = events.next(Duration::from_secs(30)).await {
        if name == "done" {
            break;
        }
        seen.push(data["epoch"].as_u64().unwrap());
    }
    check(seen == (1..=60).collect::<Vec<_>>(), "late subscriber saw a gap or duplicate")?;

    let _ = stop_tx.send(());
    server.await.unwrap().map_err(|e| e.to_string())?;
    Ok(format!(
        "20 state/action pairs ({illegal} conflicts, state unchanged); 100 epoch events + 1 done; late connect at k={k} replayed 1..{k} then live"
    ))
}

fn c10_session_protocol() -> Outcome {
    tokio::runtime::Runtime::new().unwrap().block_on(session_protocol())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("expectation equals Tr(rho (Z x I))", c1_expectation_oracle),
        ("Bell-state density matrix", c2_bell_fixture),
        ("parameter-shift gradient vs finite differences", c3_gradient_exactness),
        ("matched configuration accuracy", c4_matched_accuracy),
        ("mismatch accuracy gap", c5_mismatch_gap),
        ("separation ordering", c6_separation_ordering),
        ("PCA against dense eigensolver", c7_pca_correctness),
        ("pause/resume determinism", c8_pause_resume_determinism),
        ("sweep completeness and determinism", c9_sweep_completeness),
        ("session protocol", c10_session_protocol),
    ];
    let mut failures = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", n + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
