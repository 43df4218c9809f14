//! Deterministic discrete-event simulation of attacks on screen-reader
//! assisted authentication flows.
//!
//! The modeled user is a policy automaton, not a cognitive model: they act
//! only on announced content, accept what is announced as legitimate unless
//! the announcement carries a distinguishing detail their reader conveys,
//! and give in to repeated prompts once an exhaustion threshold is reached.
//! Attacker timing is fixed (skew and interval parameters); the seed only
//! breaks ties between simultaneous events, so identical inputs always yield
//! identical traces and verdicts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AuthCategory, AuthMethod, NotificationOrdering, OtpAnnouncement, OtpStyle, OverlayHandling,
    PlatformKind, PlatformSetting, PromptReading, ScreenReaderProfile, SettingKind, Verdict,
};
use crate::phonetics::spoken_similarity;

/// Illustrative lookalike pair used in phishing traces.
const PHISH_PAIR: (&str, &str) = ("bankofamerica.com", "bankoffamerica.com");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Interval between attacker pushes (the fixed t of fatigue spam).
    pub fatigue_interval_s: f64,
    /// How many pushes the attacker sends before giving up.
    pub fatigue_rounds: u32,
    /// Denied attempts after which lockout-enforcing methods lock the
    /// account. Applies only to methods with `enforces_push_lockout`.
    pub admin_lockout_threshold: Option<u32>,
    /// Prompt count at which the modeled user accepts out of fatigue.
    pub exhaustion_threshold: u32,
    /// Seconds between the victim's login and the attacker's.
    pub concurrency_skew_s: f64,
    /// Tie-break seed for simultaneous events; nothing else is random.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            fatigue_interval_s: 5.0,
            fatigue_rounds: 20,
            admin_lockout_threshold: Some(5),
            exhaustion_threshold: 10,
            concurrency_skew_s: 1.0,
            rng_seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttackKind {
    PhishingRelay,
    ConcurrentLogin,
    NotificationFatigue,
    ShoulderSurfOtp,
    DisplayOverlay,
    CrossService,
    Downgrade,
    MisRegistration,
}

impl AttackKind {
    pub const ALL: [AttackKind; 8] = [
        AttackKind::PhishingRelay,
        AttackKind::ConcurrentLogin,
        AttackKind::NotificationFatigue,
        AttackKind::ShoulderSurfOtp,
        AttackKind::DisplayOverlay,
        AttackKind::CrossService,
        AttackKind::Downgrade,
        AttackKind::MisRegistration,
    ];

    pub fn applies_to(self, category: AuthCategory) -> bool {
        match self {
            AttackKind::PhishingRelay | AttackKind::ShoulderSurfOtp => category.is_otp(),
            AttackKind::ConcurrentLogin | AttackKind::NotificationFatigue => category.is_push(),
            AttackKind::DisplayOverlay | AttackKind::CrossService | AttackKind::Downgrade => {
                category == AuthCategory::FidoMfa
            }
            AttackKind::MisRegistration => category == AuthCategory::FidoMfa || category.is_otp(),
        }
    }
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AttackKind::PhishingRelay => "PHISHING_RELAY",
            AttackKind::ConcurrentLogin => "CONCURRENT_LOGIN",
            AttackKind::NotificationFatigue => "NOTIFICATION_FATIGUE",
            AttackKind::ShoulderSurfOtp => "SHOULDER_SURF_OTP",
            AttackKind::DisplayOverlay => "DISPLAY_OVERLAY",
            AttackKind::CrossService => "CROSS_SERVICE",
            AttackKind::Downgrade => "DOWNGRADE",
            AttackKind::MisRegistration => "MIS_REGISTRATION",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| format!("unknown attack {s:?}"))
    }
}

/// Outcome of one (method, setting, attack) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub attack: AttackKind,
    pub method: String,
    pub setting: SettingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_reader: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smartphone_reader: Option<String>,
    pub verdict: Verdict,
    pub trace: Vec<String>,
    pub rounds_elapsed: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("method {method:?} does not support setting {setting:?}")]
    UnsupportedPair {
        method: String,
        setting: SettingKind,
    },
    #[error("unknown profile id {0:?}")]
    UnknownProfile(String),
    #[error("profile {id:?} is a {actual:?} reader; setting slot needs {expected:?}")]
    PlatformMismatch {
        id: String,
        expected: PlatformKind,
        actual: PlatformKind,
    },
    #[error("setting is malformed: {0}")]
    MalformedSetting(String),
}

/// The two resolved readers of a setting.
struct Readers<'a> {
    terminal: Option<&'a ScreenReaderProfile>,
    smartphone: Option<&'a ScreenReaderProfile>,
}

impl<'a> Readers<'a> {
    /// Reader handling push/FIDO interaction surfaces: the smartphone reader
    /// when present (pushes land on the phone), else the terminal reader.
    fn notification_reader(&self) -> &'a ScreenReaderProfile {
        self.smartphone.or(self.terminal).expect("resolved setting")
    }

    /// Reader facing OS security prompts: terminal when present (security
    /// key and Windows Security live on the PC), else smartphone.
    fn prompt_reader(&self) -> &'a ScreenReaderProfile {
        self.terminal.or(self.smartphone).expect("resolved setting")
    }
}

fn resolve<'a>(
    setting: &PlatformSetting,
    profiles: &'a [ScreenReaderProfile],
    slot: &Option<String>,
    expected: PlatformKind,
) -> Result<Option<&'a ScreenReaderProfile>, SimError> {
    let Some(id) = slot else { return Ok(None) };
    let _ = setting;
    let profile = profiles
        .iter()
        .find(|p| &p.id == id)
        .ok_or_else(|| SimError::UnknownProfile(id.clone()))?;
    if profile.platform != expected {
        return Err(SimError::PlatformMismatch {
            id: id.clone(),
            expected,
            actual: profile.platform,
        });
    }
    Ok(Some(profile))
}

fn resolve_readers<'a>(
    setting: &PlatformSetting,
    profiles: &'a [ScreenReaderProfile],
) -> Result<Readers<'a>, SimError> {
    let violations = setting.violations();
    if !violations.is_empty() {
        return Err(SimError::MalformedSetting(violations.join("; ")));
    }
    Ok(Readers {
        terminal: resolve(setting, profiles, &setting.terminal_reader, PlatformKind::Terminal)?,
        smartphone: resolve(
            setting,
            profiles,
            &setting.smartphone_reader,
            PlatformKind::Smartphone,
        )?,
    })
}

fn supports(method: &AuthMethod, setting: &PlatformSetting) -> bool {
    match setting.kind {
        SettingKind::Terminal => method.supported_platforms.contains(&PlatformKind::Terminal),
        SettingKind::Smartphone => method
            .supported_platforms
            .contains(&PlatformKind::Smartphone),
        SettingKind::Concurrent => !method.supported_platforms.is_empty(),
    }
}

/// splitmix64; good enough for tie-breaking and dependency-free.
fn tie_break(seed: u64) -> bool {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z = z ^ (z >> 31);
    z & 1 == 0
}

/// Which device announces this method's OTP, given the setting.
fn otp_device(method: &AuthMethod, readers: &Readers<'_>) -> PlatformKind {
    match method.category {
        // texts and calls always land on the phone when one is present
        AuthCategory::OtpText | AuthCategory::OtpCall => {
            if readers.smartphone.is_some() {
                PlatformKind::Smartphone
            } else {
                PlatformKind::Terminal
            }
        }
        _ => {
            if readers.terminal.is_some()
                && method.supported_platforms.contains(&PlatformKind::Terminal)
            {
                PlatformKind::Terminal
            } else {
                PlatformKind::Smartphone
            }
        }
    }
}

struct Ctx<'a> {
    method: &'a AuthMethod,
    setting: &'a PlatformSetting,
    readers: Readers<'a>,
    config: &'a SimConfig,
    trace: Vec<String>,
}

impl<'a> Ctx<'a> {
    fn say(&mut self, t: f64, line: impl AsRef<str>) {
        self.trace.push(format!("t={t:.1}s {}", line.as_ref()));
    }

    fn note(&mut self, line: impl AsRef<str>) {
        self.trace.push(line.as_ref().to_string());
    }

    fn outcome(self, attack: AttackKind, verdict: Verdict, rounds: u32) -> AttackOutcome {
        AttackOutcome {
            attack,
            method: self.method.id.clone(),
            setting: self.setting.kind,
            terminal_reader: self.setting.terminal_reader.clone(),
            smartphone_reader: self.setting.smartphone_reader.clone(),
            verdict,
            trace: self.trace,
            rounds_elapsed: rounds,
        }
    }
}

fn concurrent_login(mut ctx: Ctx<'_>) -> AttackOutcome {
    let reader = ctx.readers.notification_reader();
    let reader_id = reader.id.clone();
    let ordering = reader.notification_ordering;
    let reads_details = reader.reads_service_name_in_prompt;
    let skew = ctx.config.concurrency_skew_s;

    ctx.say(0.0, "victim initiates login; legitimate push issued");
    ctx.say(skew, "attacker initiates concurrent login; attacker push issued");
    let attacker_announced = if skew != 0.0 {
        true
    } else {
        tie_break(ctx.config.rng_seed)
    };
    ctx.note(format!(
        "notification queue ordered {} for {}",
        match ordering {
            NotificationOrdering::NewestOverrides => "newest-first (latest push overrides)",
            NotificationOrdering::OldestOnTop => "oldest-on-top (latest push still banners first)",
        },
        reader_id,
    ));
    if !attacker_announced {
        ctx.say(
            skew,
            "simultaneous arrival; victim's own push is announced first and approved",
        );
        return ctx.outcome(AttackKind::ConcurrentLogin, Verdict::NotVulnerable, 1);
    }
    ctx.say(skew, "reader announces the attacker's notification");
    if ctx.method.exposes_login_details && reads_details {
        ctx.note(
            "announcement carries originating device and city and the reader conveys them; \
             acceptance depends on the victim checking those details",
        );
        return ctx.outcome(AttackKind::ConcurrentLogin, Verdict::Partial, 1);
    }
    if ctx.method.exposes_login_details {
        ctx.note(format!(
            "prompt shows device and city but {reader_id} does not convey them"
        ));
    } else {
        ctx.note("announcement carries no detail distinguishing the attacker's session");
    }
    ctx.note("victim accepts the announced push, believing it their own");
    ctx.outcome(AttackKind::ConcurrentLogin, Verdict::Vulnerable, 1)
}

fn notification_fatigue(mut ctx: Ctx<'_>) -> AttackOutcome {
    let lockout = if ctx.method.enforces_push_lockout {
        ctx.config.admin_lockout_threshold
    } else {
        None
    };
    let select_confirm = ctx.method.category == AuthCategory::PushSelectConfirm;
    ctx.note(format!(
        "attacker pushes every {:.1}s for up to {} rounds",
        ctx.config.fatigue_interval_s, ctx.config.fatigue_rounds
    ));
    let mut denials: u32 = 0;
    for round in 1..=ctx.config.fatigue_rounds {
        let t = round as f64 * ctx.config.fatigue_interval_s;
        if let Some(k) = lockout {
            if denials >= k {
                ctx.say(
                    t,
                    format!("account locked after {k} denied attempts (administrator threshold)"),
                );
                ctx.note("attack blocked by lockout, at the cost of locking the victim out");
                return ctx.outcome(
                    AttackKind::NotificationFatigue,
                    Verdict::Partial,
                    round - 1,
                );
            }
        }
        if select_confirm && round == 2 {
            ctx.say(
                t,
                "after the first denial the prompt degrades to plain approve/deny options",
            );
        }
        if round >= ctx.config.exhaustion_threshold {
            ctx.say(t, format!("push {round} announced; user accepts out of exhaustion"));
            return ctx.outcome(AttackKind::NotificationFatigue, Verdict::Vulnerable, round);
        }
        ctx.say(t, format!("push {round} announced; user denies"));
        denials += 1;
    }
    ctx.note("attacker gives up before the user relents");
    let rounds = ctx.config.fatigue_rounds;
    ctx.outcome(AttackKind::NotificationFatigue, Verdict::NotVulnerable, rounds)
}

fn shoulder_surf(mut ctx: Ctx<'_>) -> AttackOutcome {
    ctx.say(0.0, "victim clicks login; attacker triggers forgot-password at the same time");
    ctx.say(0.5, "service sends one OTP; victim assumes it belongs to their own request");

    let device = otp_device(ctx.method, &ctx.readers);
    let reader_id = match device {
        PlatformKind::Terminal => ctx.readers.prompt_reader().id.clone(),
        PlatformKind::Smartphone => ctx.readers.notification_reader().id.clone(),
    };
    // single-device use keeps headphones on; concurrent use cannot cover both
    let mut headphones = match ctx.setting.kind {
        SettingKind::Concurrent => {
            ctx.note(
                "terminal: headphones on; smartphone: headphones off \
                 (concurrent use leaves one device unprotected)",
            );
            device == PlatformKind::Terminal
        }
        _ => true,
    };
    if ctx.method.category == AuthCategory::OtpCall {
        ctx.note("incoming call disconnects headphones and activates the loudspeaker");
        headphones = false;
    }
    let spoken = ctx.method.otp_announcement != OtpAnnouncement::Masked
        && match device {
            PlatformKind::Terminal => ctx.readers.prompt_reader().otp_pronunciation,
            PlatformKind::Smartphone => ctx.readers.notification_reader().otp_pronunciation,
        } != OtpStyle::Hidden;
    if !spoken {
        ctx.note("the OTP is never vocalized; nothing to overhear");
        return ctx.outcome(AttackKind::ShoulderSurfOtp, Verdict::NotVulnerable, 1);
    }
    ctx.say(
        1.0,
        format!(
            "{} announces the OTP aloud on the {} (headphones {})",
            reader_id,
            match device {
                PlatformKind::Terminal => "terminal",
                PlatformKind::Smartphone => "smartphone",
            },
            if headphones { "on" } else { "off" }
        ),
    );
    if headphones {
        ctx.note("audio stays in the headphones; the attacker hears nothing");
        return ctx.outcome(AttackKind::ShoulderSurfOtp, Verdict::NotVulnerable, 1);
    }
    ctx.say(1.5, "attacker overhears the OTP and completes the forgot-password flow");
    ctx.outcome(AttackKind::ShoulderSurfOtp, Verdict::Vulnerable, 1)
}

/// Feasibility gate shared by phishing relay and OTP mis-registration:
/// whether this (method, reader, setting) can obtain and enter a code.
fn otp_relay_verdict(ctx: &mut Ctx<'_>) -> Verdict {
    let similarity = spoken_similarity(PHISH_PAIR.0, PHISH_PAIR.1).unwrap_or(0.0);
    ctx.note(format!(
        "attacker link {:?} is spoken identically to {:?} (similarity {:.2})",
        PHISH_PAIR.1, PHISH_PAIR.0, similarity
    ));
    if ctx.method.category == AuthCategory::OtpCall {
        ctx.note("call-delivered OTP conflicts with reader instructions; flow infeasible");
        return Verdict::NotApplicable;
    }
    let device = otp_device(ctx.method, &ctx.readers);
    let reader = match device {
        PlatformKind::Terminal => ctx.readers.prompt_reader(),
        PlatformKind::Smartphone => ctx.readers.notification_reader(),
    };
    let (reader_id, reader_style, reads_outside) = (
        reader.id.clone(),
        reader.otp_pronunciation,
        reader.reads_outside_browser,
    );
    if ctx.method.requires_outside_browser && !reads_outside {
        ctx.note(format!(
            "{reader_id} cannot reach the authenticator outside the browser; flow infeasible"
        ));
        return Verdict::NotApplicable;
    }
    if ctx.method.otp_announcement == OtpAnnouncement::Masked || reader_style == OtpStyle::Hidden {
        ctx.note("the code is never vocalized; the victim cannot relay it");
        return Verdict::NotApplicable;
    }
    let degraded = matches!(
        ctx.method.otp_announcement,
        OtpAnnouncement::Grouped | OtpAnnouncement::Numeric
    ) || matches!(
        reader_style,
        OtpStyle::NumericWhole | OtpStyle::NumericGrouped
    );
    if degraded {
        ctx.note("the code is pronounced as numeric values; entry is error-prone (NPO)");
        Verdict::Partial
    } else {
        ctx.note("the code is conveyed cleanly; victim types it into the attacker's page");
        Verdict::Vulnerable
    }
}

fn phishing_relay(mut ctx: Ctx<'_>) -> AttackOutcome {
    ctx.say(0.0, "victim follows the announced link to the attacker's page");
    let verdict = otp_relay_verdict(&mut ctx);
    ctx.outcome(AttackKind::PhishingRelay, verdict, 1)
}

fn mis_registration(mut ctx: Ctx<'_>) -> AttackOutcome {
    ctx.say(0.0, "victim is lured to register on the attacker's page");
    let verdict = if ctx.method.category == AuthCategory::FidoMfa {
        let similarity = spoken_similarity(PHISH_PAIR.0, PHISH_PAIR.1).unwrap_or(0.0);
        ctx.note(format!(
            "registration site {:?} is spoken identically to {:?} (similarity {:.2})",
            PHISH_PAIR.1, PHISH_PAIR.0, similarity
        ));
        ctx.note("key registration binds the credential to the attacker-controlled origin");
        Verdict::Vulnerable
    } else {
        otp_relay_verdict(&mut ctx)
    };
    ctx.outcome(AttackKind::MisRegistration, verdict, 1)
}

fn display_overlay(mut ctx: Ctx<'_>) -> AttackOutcome {
    let reader = ctx.readers.prompt_reader();
    let (reader_id, handling) = (reader.id.clone(), reader.overlay_handling);
    ctx.say(0.0, "attacker draws false content over the legitimate transaction view");
    match handling {
        OverlayHandling::ReadsOverlay => {
            ctx.note(format!("{reader_id} reads the overlay's false information"));
            ctx.outcome(AttackKind::DisplayOverlay, Verdict::Vulnerable, 1)
        }
        OverlayHandling::ReadsUnderlying => {
            ctx.note(format!("{reader_id} bypasses the overlay and reads the correct data"));
            ctx.outcome(AttackKind::DisplayOverlay, Verdict::NotVulnerable, 1)
        }
    }
}

fn cross_service(mut ctx: Ctx<'_>) -> AttackOutcome {
    let reader = ctx.readers.prompt_reader();
    let (reader_id, prompts, names) = (
        reader.id.clone(),
        reader.reads_security_prompts,
        reader.reads_service_name_in_prompt,
    );
    ctx.say(0.0, "attacker relays a security prompt for a different service");
    if prompts == PromptReading::None {
        ctx.note(format!("{reader_id} cannot read the security prompt at all"));
        return ctx.outcome(AttackKind::CrossService, Verdict::Vulnerable, 1);
    }
    if names {
        ctx.note(format!(
            "{reader_id} announces the service name in the prompt; the victim notices the mismatch"
        ));
        return ctx.outcome(AttackKind::CrossService, Verdict::NotVulnerable, 1);
    }
    ctx.note(format!(
        "{reader_id} reads the prompt but not the service or browser name"
    ));
    ctx.outcome(AttackKind::CrossService, Verdict::Vulnerable, 1)
}

fn downgrade(mut ctx: Ctx<'_>) -> AttackOutcome {
    let similarity = spoken_similarity(PHISH_PAIR.0, PHISH_PAIR.1).unwrap_or(0.0);
    ctx.say(0.0, "attacker lures the victim to a lookalike page posing as a fallback login");
    ctx.note(format!(
        "the phishing link is spoken as the legitimate domain (similarity {similarity:.2})"
    ));
    ctx.note("no reader distinguishes the fake prompt steering the victim to a weaker factor");
    ctx.say(1.0, "victim authenticates with the downgraded factor; attacker relays it live");
    ctx.outcome(AttackKind::Downgrade, Verdict::Vulnerable, 1)
}

/// Simulate one attack against one (method, setting) cell.
///
/// Inapplicable attacks produce a NOT_APPLICABLE outcome; unsupported
/// (method, setting) pairs are errors.
pub fn run_attack(
    method: &AuthMethod,
    setting: &PlatformSetting,
    profiles: &[ScreenReaderProfile],
    attack: AttackKind,
    config: &SimConfig,
) -> Result<AttackOutcome, SimError> {
    if !supports(method, setting) {
        return Err(SimError::UnsupportedPair {
            method: method.id.clone(),
            setting: setting.kind,
        });
    }
    let readers = resolve_readers(setting, profiles)?;
    let mut ctx = Ctx {
        method,
        setting,
        readers,
        config,
        trace: Vec::new(),
    };
    if !attack.applies_to(method.category) {
        ctx.note(format!(
            "{attack} is undefined for category {:?}",
            method.category
        ));
        return Ok(ctx.outcome(attack, Verdict::NotApplicable, 0));
    }
    Ok(match attack {
        AttackKind::ConcurrentLogin => concurrent_login(ctx),
        AttackKind::NotificationFatigue => notification_fatigue(ctx),
        AttackKind::ShoulderSurfOtp => shoulder_surf(ctx),
        AttackKind::PhishingRelay => phishing_relay(ctx),
        AttackKind::MisRegistration => mis_registration(ctx),
        AttackKind::DisplayOverlay => display_overlay(ctx),
        AttackKind::CrossService => cross_service(ctx),
        AttackKind::Downgrade => downgrade(ctx),
    })
}

/// Key giving the stable (method, setting, attack) output order.
fn cell_key(o: &AttackOutcome) -> (String, SettingKind, String, String, AttackKind) {
    (
        o.method.clone(),
        o.setting,
        o.terminal_reader.clone().unwrap_or_default(),
        o.smartphone_reader.clone().unwrap_or_default(),
        o.attack,
    )
}

/// Evaluate the full Cartesian product, skipping unsupported
/// (method, setting) pairs, in stable (method, setting, attack) order.
pub fn run_matrix(
    methods: &[AuthMethod],
    settings: &[PlatformSetting],
    profiles: &[ScreenReaderProfile],
    attacks: &[AttackKind],
    config: &SimConfig,
) -> Result<Vec<AttackOutcome>, SimError> {
    let mut outcomes = Vec::new();
    for method in methods {
        for setting in settings {
            if !supports(method, setting) {
                continue;
            }
            for &attack in attacks {
                outcomes.push(run_attack(method, setting, profiles, attack, config)?);
            }
        }
    }
    outcomes.sort_by(|a, b| cell_key(a).cmp(&cell_key(b)));
    Ok(outcomes)
}

/// One TERMINAL setting per terminal profile, one SMARTPHONE setting per
/// smartphone profile, plus the given concurrent pairings.
pub fn settings_for(
    profiles: &[ScreenReaderProfile],
    concurrent_pairs: &[(String, String)],
) -> Vec<PlatformSetting> {
    let mut settings = Vec::new();
    for p in profiles {
        match p.platform {
            PlatformKind::Terminal => settings.push(PlatformSetting::terminal(&p.id)),
            PlatformKind::Smartphone => settings.push(PlatformSetting::smartphone(&p.id)),
        }
    }
    for (t, s) in concurrent_pairs {
        settings.push(PlatformSetting::concurrent(t, s));
    }
    settings
}
