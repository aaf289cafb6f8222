// Handlers written in Rust instead of declared in the SUT definition. Node
// handlers only get a shared borrow of the session, so an assertion cannot
// change the app state.

use modelwalk::demo;
use modelwalk::emit::to_runner_script;
use modelwalk::generate::compose_test;
use modelwalk::runner::{execute, ActionOutcome, AssertOutcome, Handler, HandlerRegistry, RunnerError};
use modelwalk::sutsim::SutSession;
use std::error::Error;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

fn screen_is(state: &'static str) -> Handler {
    Handler::assert(move |s: &SutSession| {
        if s.state().as_str() == state {
            AssertOutcome::Pass
        } else {
            AssertOutcome::Fail(format!("expected {state}, on {}", s.state()))
        }
    })
}

fn tap(action: &'static str) -> Handler {
    Handler::action(move |s: &mut SutSession| match s.apply_action(action) {
        Ok(_) => ActionOutcome::Performed,
        Err(e) => ActionOutcome::Crashed(e.to_string()),
    })
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let script = to_runner_script(&compose_test(&model, &"signin".into(), 3)?)?;
    print!("{}", script.to_text());

    let logins = Arc::new(AtomicUsize::new(0));
    let counter = logins.clone();
    let registry = HandlerRegistry::new().register_handlers([
        ("v_appinstalled", Handler::assert(|s: &SutSession| {
            if s.snapshot().is_err() { AssertOutcome::Pass } else { AssertOutcome::Fail("already running".into()) }
        })),
        ("e_startapp", tap("start")),
        ("v_signinpage", screen_is("SignInPage")),
        ("e_login", Handler::action(move |s: &mut SutSession| {
            counter.fetch_add(1, Ordering::Relaxed);
            match s.apply_action("login") {
                Ok(_) => ActionOutcome::Performed,
                Err(e) => ActionOutcome::Failed(e.to_string()),
            }
        })),
        ("v_home", screen_is("Home")),
        ("e_logout", tap("logout")),
    ])?;

    let device = &demo::devices()[0];
    let report = execute(&script, &mut demo::session_for(&demo::sut_spec(), device), &registry, device)?;
    println!("verdict {:?}, {} logins", report.verdict, logins.load(Ordering::Relaxed));
    assert!(report.passed());

    // registering a name twice is rejected
    let dup = HandlerRegistry::new().register_handlers([("v_home", screen_is("Home")), ("v_home", screen_is("Home"))]);
    assert!(matches!(dup, Err(RunnerError::DuplicateHandler(_))));

    // a script step without a handler is caught before anything runs
    let search = to_runner_script(&compose_test(&model, &"search".into(), 3)?)?;
    let unbound = registry.check_script(&search).unwrap_err();
    println!("{unbound}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
