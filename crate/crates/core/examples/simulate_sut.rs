// Driving the simulated app by hand: lifecycle, guarded actions, external
// events and the transition log.

use modelwalk::demo;
use modelwalk::sutsim::{log_to_text, replay_log, SutError, SutSession};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = demo::sut_spec();
    let mut app = SutSession::installed(spec.clone());
    app.apply_action("start")?;
    app.apply_action("login")?;
    app.apply_action("open_search")?;
    app.apply_action("submit_query")?;
    let screen = app.snapshot()?;
    println!("on {}: {:?}", app.state(), screen.elements.iter().map(|e| &e.text).collect::<Vec<_>>());

    // the backend goes away while results are shown
    let fired = app.inject_event("service_down")?;
    println!("service_down fired {fired:?}, now on {}", app.state());
    match app.apply_action("open_result") {
        Err(SutError::NoEnabledTransition { state, action }) => {
            println!("`{action}` does nothing on {state}")
        }
        other => return Err(format!("unexpected {other:?}").into()),
    }
    app.inject_event("service_up")?;
    app.apply_action("open_result")?;

    print!("{}", log_to_text(app.transition_log()));
    assert_eq!(&replay_log(&spec, app.transition_log())?, app.state());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
