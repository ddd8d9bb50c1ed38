use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Axiom,
    Lemma,
    Res,
    WRes,
    Weaken,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Tree,
    /// A dag encoded as a tree whose lemma leaves are the reuse edges.
    /// Implies unrestricted lemmas; regularity then follows dag paths.
    Dag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaPolicy {
    None,
    Any,
    InputOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSet {
    pub res: bool,
    pub wres: bool,
    pub weaken: bool,
}

impl RuleSet {
    pub const RES: RuleSet = RuleSet { res: true, wres: false, weaken: false };
    pub const W: RuleSet = RuleSet { res: true, wres: true, weaken: false };
    pub const WEAKEN: RuleSet = RuleSet { res: true, wres: false, weaken: true };
    pub const ALL: RuleSet = RuleSet { res: true, wres: true, weaken: true };

    pub fn allows(&self, kind: RuleKind) -> bool {
        match kind {
            RuleKind::Axiom | RuleKind::Lemma => true,
            RuleKind::Res => self.res,
            RuleKind::WRes => self.wres,
            RuleKind::Weaken => self.weaken,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SystemDescriptor {
    pub shape: Shape,
    pub lemmas: LemmaPolicy,
    pub rules: RuleSet,
    pub regular: bool,
    pub max_lemma_size: Option<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown proof system `{0}`")]
pub struct UnknownSystem(pub String);

impl SystemDescriptor {
    const fn tree(lemmas: LemmaPolicy, rules: RuleSet) -> SystemDescriptor {
        SystemDescriptor { shape: Shape::Tree, lemmas, rules, regular: false, max_lemma_size: None }
    }

    pub const fn rt() -> Self {
        Self::tree(LemmaPolicy::None, RuleSet::RES)
    }
    pub const fn rtl() -> Self {
        Self::tree(LemmaPolicy::Any, RuleSet::RES)
    }
    pub const fn rti() -> Self {
        Self::tree(LemmaPolicy::InputOnly, RuleSet::RES)
    }
    pub const fn wrt() -> Self {
        Self::tree(LemmaPolicy::None, RuleSet::W)
    }
    pub const fn wrtl() -> Self {
        Self::tree(LemmaPolicy::Any, RuleSet::W)
    }
    pub const fn wrti() -> Self {
        Self::tree(LemmaPolicy::InputOnly, RuleSet::W)
    }
    pub const fn rtw() -> Self {
        Self::tree(LemmaPolicy::None, RuleSet::WEAKEN)
    }
    pub const fn rtlw(k: usize) -> Self {
        let mut s = Self::tree(LemmaPolicy::Any, RuleSet::WEAKEN);
        s.max_lemma_size = Some(k);
        s
    }
    pub const fn rd() -> Self {
        SystemDescriptor {
            shape: Shape::Dag,
            lemmas: LemmaPolicy::Any,
            rules: RuleSet::RES,
            regular: false,
            max_lemma_size: None,
        }
    }
    pub const fn wrd() -> Self {
        let mut s = Self::rd();
        s.rules = RuleSet::W;
        s
    }

    pub const fn regular(mut self) -> Self {
        self.regular = true;
        self
    }

    pub const fn with_max_lemma(mut self, k: Option<usize>) -> Self {
        self.max_lemma_size = k;
        self
    }

    /// Parses names such as `rt`, `regwrti`, `rtlw` (lemma bound set separately).
    pub fn from_name(name: &str) -> Result<SystemDescriptor, UnknownSystem> {
        let lower = name.to_ascii_lowercase();
        let (regular, base) = match lower.strip_prefix("reg") {
            Some(rest) => (true, rest),
            None => (false, lower.as_str()),
        };
        let sys = match base {
            "rt" => Self::rt(),
            "rtl" => Self::rtl(),
            "rti" => Self::rti(),
            "wrt" => Self::wrt(),
            "wrtl" => Self::wrtl(),
            "wrti" => Self::wrti(),
            "rtw" => Self::rtw(),
            "rtlw" => Self::tree(LemmaPolicy::Any, RuleSet::WEAKEN),
            "rd" => Self::rd(),
            "wrd" => Self::wrd(),
            _ => return Err(UnknownSystem(name.to_string())),
        };
        Ok(if regular { sys.regular() } else { sys })
    }

    pub fn name(&self) -> String {
        let mut s = String::new();
        if self.regular {
            s.push_str("reg");
        }
        if self.rules.wres {
            s.push('w');
        }
        match self.shape {
            Shape::Dag => s.push_str("rd"),
            Shape::Tree => {
                s.push_str("rt");
                match self.lemmas {
                    LemmaPolicy::None => {}
                    LemmaPolicy::Any => s.push('l'),
                    LemmaPolicy::InputOnly => s.push('i'),
                }
            }
        }
        if self.rules.weaken {
            s.push('w');
        }
        s
    }
}

impl fmt::Display for SystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if let Some(k) = self.max_lemma_size {
            write!(f, "({k})")?;
        }
        Ok(())
    }
}
