//! Textual expression language naming strategies, e.g. `blocksq(2)`,
//! `amc(code6)`, `prod(amc(code6),blocksq(2))`, `pad(blocksq(3),5)` or
//! `tau(hamming4,4,--no-flip)`.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::code::{self, BinaryCode, TauSearchOutcome};
use crate::game::StrategyProfile;
use crate::strategy::{
    alice_mode_compose, block_square_strategy, code_family_strategy, pad_strategy,
    product_compose, six_word_family, tau_strategy, trivial_strategy, StrategyError,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(
        "no saturating subset-to-codeword matching: matched {max_matching} of {left_count} subsets"
    )]
    NoTauMatching {
        max_matching: usize,
        left_count: usize,
    },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Code(#[from] code::CodeError),
}

/// Where a tau strategy's codebook comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    /// `hamming<r>`: the built-in length `2^r - 1` code.
    Hamming(u32),
    /// A code file on disk.
    File(String),
}

impl fmt::Display for CodeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSource::Hamming(r) => write!(f, "hamming{r}"),
            CodeSource::File(path) => write!(f, "{path}"),
        }
    }
}

impl CodeSource {
    pub fn load(&self) -> Result<BinaryCode, SpecError> {
        match self {
            CodeSource::Hamming(r) => Ok(code::hamming_code(*r)?),
            CodeSource::File(path) => Ok(code::load_code(Path::new(path))?),
        }
    }
}

/// A derivation tree over the base constructions and combinators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Trivial(usize),
    BlockSquare(usize),
    /// The built-in six-word distance-3 family as a `(5, 1, 6)` strategy.
    CodeSix,
    Prod(Box<StrategySpec>, Box<StrategySpec>),
    Amc(Box<StrategySpec>),
    Pad(Box<StrategySpec>, usize),
    Tau {
        source: CodeSource,
        m: usize,
        flip: bool,
    },
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Trivial(n) => write!(f, "trivial({n})"),
            StrategySpec::BlockSquare(k) => write!(f, "blocksq({k})"),
            StrategySpec::CodeSix => write!(f, "code6"),
            StrategySpec::Prod(a, b) => write!(f, "prod({a},{b})"),
            StrategySpec::Amc(a) => write!(f, "amc({a})"),
            StrategySpec::Pad(a, m) => write!(f, "pad({a},{m})"),
            StrategySpec::Tau { source, m, flip } => {
                if *flip {
                    write!(f, "tau({source},{m})")
                } else {
                    write!(f, "tau({source},{m},--no-flip)")
                }
            }
        }
    }
}

impl StrategySpec {
    /// Declared `(k, n, k_alice)` by the combinator arithmetic, without
    /// building the profile.  Tau specs over code files require the file.
    pub fn params(&self) -> Result<(usize, usize, Option<usize>), SpecError> {
        match self {
            StrategySpec::Trivial(n) => {
                require(*n >= 1, "trivial size must be at least 1")?;
                Ok((*n, *n, Some(1)))
            }
            StrategySpec::BlockSquare(k) => {
                require(*k >= 1, "block size must be at least 1")?;
                Ok((*k, k * k, None))
            }
            StrategySpec::CodeSix => Ok((5, 6, Some(1))),
            StrategySpec::Prod(a, b) => {
                let (ka, na, _) = a.params()?;
                let (kb, nb, _) = b.params()?;
                Ok((ka * kb, na * nb, None))
            }
            StrategySpec::Amc(a) => {
                let (k, n, k_alice) = a.params()?;
                let k_alice = k_alice.ok_or_else(|| {
                    SpecError::Invalid(format!("amc needs an alice-mode strategy, got {a}"))
                })?;
                let blocks = k / k_alice;
                require(blocks >= 1, "amc needs floor(k / k_alice) >= 1")?;
                Ok((k, blocks * n, None))
            }
            StrategySpec::Pad(a, m) => {
                let (k, n, _) = a.params()?;
                require(
                    *m >= 1 && *m < n,
                    &format!("pad target must be in 1..{n}, got {m}"),
                )?;
                Ok((k, *m, None))
            }
            StrategySpec::Tau { source, m, .. } => {
                let n = match source {
                    CodeSource::Hamming(r) => {
                        require((2..=4).contains(r), "hamming parameter must be 2..=4")?;
                        (1usize << r) - 1
                    }
                    CodeSource::File(_) => source.load()?.length(),
                };
                require(*m >= 1 && *m < n, &format!("subset size must be in 1..{n}"))?;
                Ok((n - m, n, Some(1)))
            }
        }
    }

    /// Builds the profile.  For tau specs this runs the matching; a deficient
    /// matching is a negative result, not a usage error.
    pub fn build(&self) -> Result<StrategyProfile, SpecError> {
        self.params()?; // surface arithmetic errors first
        match self {
            StrategySpec::Trivial(n) => Ok(trivial_strategy(*n)),
            StrategySpec::BlockSquare(k) => Ok(block_square_strategy(*k)),
            StrategySpec::CodeSix => Ok(code_family_strategy(&six_word_family())),
            StrategySpec::Prod(a, b) => Ok(product_compose(&a.build()?, &b.build()?)),
            StrategySpec::Amc(a) => Ok(alice_mode_compose(&a.build()?)?),
            StrategySpec::Pad(a, m) => Ok(pad_strategy(&a.build()?, *m)?),
            StrategySpec::Tau { source, m, flip } => {
                let codebook = source.load()?;
                match code::tau_matching(&codebook, *m)? {
                    TauSearchOutcome::Saturated(map) => {
                        Ok(tau_strategy(&codebook, &map, *flip)?)
                    }
                    TauSearchOutcome::Deficient {
                        max_matching,
                        left_count,
                        ..
                    } => Err(SpecError::NoTauMatching {
                        max_matching,
                        left_count,
                    }),
                }
            }
        }
    }

    pub fn parse(input: &str) -> Result<Self, SpecError> {
        let mut tokens = Tokenizer::new(input);
        let spec = parse_expr(&mut tokens)?;
        match tokens.next() {
            None => Ok(spec),
            Some(tok) => Err(SpecError::Parse(format!("unexpected trailing {tok:?}"))),
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), SpecError> {
    if cond {
        Ok(())
    } else {
        Err(SpecError::Invalid(msg.to_string()))
    }
}

impl std::str::FromStr for StrategySpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategySpec::parse(s)
    }
}

// ============================================================================
// Parser
// ============================================================================

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Open,
    Close,
    Comma,
}

struct Tokenizer<'a> {
    rest: &'a str,
}

impl<'a> Tokenizer<'a> {
    fn new(input: &'a str) -> Self {
        Tokenizer { rest: input }
    }

    fn next(&mut self) -> Option<Token> {
        self.rest = self.rest.trim_start();
        let mut chars = self.rest.chars();
        match chars.next()? {
            '(' => {
                self.rest = chars.as_str();
                Some(Token::Open)
            }
            ')' => {
                self.rest = chars.as_str();
                Some(Token::Close)
            }
            ',' => {
                self.rest = chars.as_str();
                Some(Token::Comma)
            }
            _ => {
                let end = self
                    .rest
                    .find(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
                    .unwrap_or(self.rest.len());
                let (word, rest) = self.rest.split_at(end);
                self.rest = rest;
                Some(Token::Word(word.to_string()))
            }
        }
    }

    fn expect(&mut self, token: Token) -> Result<(), SpecError> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(SpecError::Parse(format!(
                "expected {token:?}, got {other:?}"
            ))),
        }
    }

    fn word(&mut self) -> Result<String, SpecError> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            other => Err(SpecError::Parse(format!("expected a name, got {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<usize, SpecError> {
        let w = self.word()?;
        w.parse()
            .map_err(|_| SpecError::Parse(format!("expected a number, got {w:?}")))
    }
}

fn parse_expr(t: &mut Tokenizer) -> Result<StrategySpec, SpecError> {
    let head = t.word()?;
    match head.as_str() {
        "code6" => Ok(StrategySpec::CodeSix),
        "trivial" => {
            t.expect(Token::Open)?;
            let n = t.number()?;
            t.expect(Token::Close)?;
            Ok(StrategySpec::Trivial(n))
        }
        "blocksq" => {
            t.expect(Token::Open)?;
            let k = t.number()?;
            t.expect(Token::Close)?;
            Ok(StrategySpec::BlockSquare(k))
        }
        "prod" => {
            t.expect(Token::Open)?;
            let a = parse_expr(t)?;
            t.expect(Token::Comma)?;
            let b = parse_expr(t)?;
            t.expect(Token::Close)?;
            Ok(StrategySpec::Prod(Box::new(a), Box::new(b)))
        }
        "amc" => {
            t.expect(Token::Open)?;
            let a = parse_expr(t)?;
            t.expect(Token::Close)?;
            Ok(StrategySpec::Amc(Box::new(a)))
        }
        "pad" => {
            t.expect(Token::Open)?;
            let a = parse_expr(t)?;
            t.expect(Token::Comma)?;
            let m = t.number()?;
            t.expect(Token::Close)?;
            Ok(StrategySpec::Pad(Box::new(a), m))
        }
        "tau" => {
            t.expect(Token::Open)?;
            let source = parse_code_source(&t.word()?)?;
            t.expect(Token::Comma)?;
            let m = t.number()?;
            let flip = match t.next() {
                Some(Token::Close) => true,
                Some(Token::Comma) => {
                    let flag = t.word()?;
                    if flag != "--no-flip" {
                        return Err(SpecError::Parse(format!(
                            "unknown tau flag {flag:?}, expected --no-flip"
                        )));
                    }
                    t.expect(Token::Close)?;
                    false
                }
                other => {
                    return Err(SpecError::Parse(format!(
                        "expected ',' or ')' in tau(...), got {other:?}"
                    )))
                }
            };
            Ok(StrategySpec::Tau { source, m, flip })
        }
        other => Err(SpecError::Parse(format!(
            "unknown construction {other:?}; known: trivial(n), blocksq(k), code6, \
             prod(a,b), amc(a), pad(a,m), tau(code,m[,--no-flip])"
        ))),
    }
}

fn parse_code_source(word: &str) -> Result<CodeSource, SpecError> {
    if let Some(r) = word.strip_prefix("hamming") {
        if let Ok(r) = r.parse::<u32>() {
            return Ok(CodeSource::Hamming(r));
        }
    }
    if word.contains('/') || word.contains('.') {
        return Ok(CodeSource::File(word.to_string()));
    }
    Err(SpecError::Parse(format!(
        "unknown code source {word:?}; use hamming<r> or a file path"
    )))
}

// ============================================================================
// Tests
// ============================================================================
