/// Outcome of a check; `failure` names the first failing case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    pub failure: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { pass: true, failure: None }
    }

    pub fn fail(why: String) -> Self {
        Verdict { pass: false, failure: Some(why) }
    }
}
