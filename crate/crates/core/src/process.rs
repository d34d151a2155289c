//! Subprocess execution with a wall-clock deadline.
//!
//! Commands run through `sh -c` in their own process group so a timeout can
//! take down the whole tree the command spawned.

use std::ffi::OsStr;
use std::io::{self, BufRead, BufReader, Read};
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct Outcome {
    /// `None` when killed by a signal, including our own timeout kill.
    pub exit_code: Option<i32>,
    /// Stdout lines with the time each arrived, relative to spawn.
    pub lines: Vec<(Duration, String)>,
    pub stderr: String,
    pub timed_out: bool,
    pub elapsed: Duration,
}

/// Run `script` with `sh -c`, passing `args` as `$1..`.
pub fn run_shell(
    script: &str,
    args: &[&OsStr],
    cwd: Option<&Path>,
    timeout: Option<Duration>,
) -> io::Result<Outcome> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(script).arg("sh").args(args);
    if let Some(dir) = cwd {
        cmd.current_dir(dir);
    }
    run(cmd, timeout, |_| false)
}

/// Like [`run_shell`], but `stop` is consulted on every stdout line and the
/// process group is killed as soon as it returns true.
pub fn run_shell_until(
    script: &str,
    cwd: Option<&Path>,
    timeout: Option<Duration>,
    stop: impl FnMut(&str) -> bool,
) -> io::Result<Outcome> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(script);
    if let Some(dir) = cwd {
        cmd.current_dir(dir);
    }
    run(cmd, timeout, stop)
}

fn run(mut cmd: Command, timeout: Option<Duration>, mut stop: impl FnMut(&str) -> bool) -> io::Result<Outcome> {
    cmd.stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0);
    let start = Instant::now();
    let deadline = timeout.map(|t| start + t);
    let mut child = cmd.spawn()?;

    let stdout = child.stdout.take().expect("piped stdout");
    let mut stderr_pipe = child.stderr.take().expect("piped stderr");
    let (tx, rx) = mpsc::channel();
    let reader = thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let Ok(line) = line else { break };
            if tx.send((start.elapsed(), line)).is_err() {
                break;
            }
        }
    });
    let stderr_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr_pipe.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    });

    let mut lines = Vec::new();
    let mut timed_out = false;
    let mut stopped = false;
    loop {
        let wait = match deadline {
            Some(d) => match d.checked_duration_since(Instant::now()) {
                Some(left) => left,
                None => {
                    timed_out = true;
                    break;
                }
            },
            None => Duration::from_secs(3600),
        };
        match rx.recv_timeout(wait) {
            Ok((at, line)) => {
                let halt = stop(&line);
                lines.push((at, line));
                if halt {
                    stopped = true;
                    break;
                }
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    timed_out = true;
                    break;
                }
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
        }
    }

    let exit_code = if timed_out || stopped {
        kill_group(&mut child);
        let _ = child.wait();
        None
    } else {
        wait_until(&mut child, deadline, &mut timed_out)?
    };
    // The pipes close once the group is gone; don't block on stragglers
    // that escaped the group.
    let _ = join_with_grace(reader);
    let stderr = join_with_grace(stderr_reader).unwrap_or_default();
    Ok(Outcome {
        exit_code,
        lines,
        stderr,
        timed_out,
        elapsed: start.elapsed(),
    })
}

fn wait_until(child: &mut Child, deadline: Option<Instant>, timed_out: &mut bool) -> io::Result<Option<i32>> {
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(status.code());
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            *timed_out = true;
            kill_group(child);
            let _ = child.wait();
            return Ok(None);
        }
        thread::sleep(Duration::from_millis(5));
    }
}

fn kill_group(child: &mut Child) {
    let pid = child.id() as libc::pid_t;
    // SAFETY: plain syscall; the child leads its own process group.
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
    let _ = child.kill();
}

fn join_with_grace<T: Send + 'static>(handle: thread::JoinHandle<T>) -> Option<T> {
    let grace = Instant::now() + Duration::from_secs(2);
    while !handle.is_finished() {
        if Instant::now() >= grace {
            return None;
        }
        thread::sleep(Duration::from_millis(2));
    }
    handle.join().ok()
}

/// Apply `f` to every item on up to `workers` threads; results keep input
/// order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, f) = (&next, &f);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                if tx.send((i, f(item))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    for (i, r) in rx {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|r| r.expect("every item processed")).collect()
}
