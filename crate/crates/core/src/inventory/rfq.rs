//! Request-for-quotation approval cycle.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RfqPhase {
    Created,
    TeamLeaderReview,
    CancelledByTeamLeader,
    RejectedAwaitingModification,
    ManagerReview,
    CancelledByManager,
    RejectedByManagerAwaitingModification,
    BuyerDetailing,
    LtsaCreated,
    SentToVendor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RfqAction {
    SupervisorIssue,
    TeamLeaderCancel,
    TeamLeaderReject,
    SupervisorModify,
    TeamLeaderApprove,
    ManagerCancel,
    ManagerReject,
    ManagerApprove,
    BuyerDetail,
    CreateLtsa,
    SendToVendor,
}

impl RfqAction {
    pub const ALL: [RfqAction; 11] = [
        RfqAction::SupervisorIssue,
        RfqAction::TeamLeaderCancel,
        RfqAction::TeamLeaderReject,
        RfqAction::SupervisorModify,
        RfqAction::TeamLeaderApprove,
        RfqAction::ManagerCancel,
        RfqAction::ManagerReject,
        RfqAction::ManagerApprove,
        RfqAction::BuyerDetail,
        RfqAction::CreateLtsa,
        RfqAction::SendToVendor,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Supervisor,
    TeamLeader,
    Manager,
    DeclaredBuyer,
    Vendor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoteKind {
    Cancellation,
    Rejection,
    ApprovalCopy,
    LtsaCopy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Note {
    pub kind: NoteKind,
    pub recipient: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{action:?} is not allowed while {phase:?}")]
pub struct IllegalTransition {
    pub phase: RfqPhase,
    pub action: RfqAction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RfqState {
    pub phase: RfqPhase,
    pub declared_buyer: String,
    pub notes: Vec<Note>,
    /// The declared buyer has filled in the details; an LTSA may be drawn up.
    pub detailed: bool,
}

impl RfqState {
    pub fn new(declared_buyer: impl Into<String>) -> Self {
        RfqState {
            phase: RfqPhase::Created,
            declared_buyer: declared_buyer.into(),
            notes: Vec::new(),
            detailed: false,
        }
    }

    pub fn is_enabled(&self, action: RfqAction) -> bool {
        use RfqAction::*;
        use RfqPhase::*;
        matches!(
            (self.phase, action),
            (Created, SupervisorIssue)
                | (TeamLeaderReview, TeamLeaderCancel | TeamLeaderReject | TeamLeaderApprove)
                | (RejectedAwaitingModification, SupervisorModify)
                | (ManagerReview, ManagerCancel | ManagerReject | ManagerApprove)
                | (RejectedByManagerAwaitingModification, SupervisorModify)
                | (LtsaCreated, SendToVendor)
        ) || (self.phase == BuyerDetailing && action == if self.detailed { CreateLtsa } else { BuyerDetail })
    }

    pub fn enabled_actions(&self) -> Vec<RfqAction> {
        RfqAction::ALL.into_iter().filter(|a| self.is_enabled(*a)).collect()
    }

    pub fn transition(&self, action: RfqAction) -> Result<RfqState, IllegalTransition> {
        use RfqAction::*;
        use RfqPhase::*;
        if !self.is_enabled(action) {
            return Err(IllegalTransition {
                phase: self.phase,
                action,
            });
        }
        let mut next = self.clone();
        let note = |kind| Note {
            kind,
            recipient: Role::Supervisor,
        };
        next.phase = match (self.phase, action) {
            (_, SupervisorIssue) => TeamLeaderReview,
            (_, TeamLeaderCancel) => {
                next.notes.push(note(NoteKind::Cancellation));
                CancelledByTeamLeader
            }
            (_, TeamLeaderReject) => {
                next.notes.push(note(NoteKind::Rejection));
                RejectedAwaitingModification
            }
            (RejectedAwaitingModification, SupervisorModify) => TeamLeaderReview,
            (_, SupervisorModify) => ManagerReview,
            (_, TeamLeaderApprove) => {
                next.notes.push(note(NoteKind::ApprovalCopy));
                ManagerReview
            }
            (_, ManagerCancel) => {
                next.notes.push(note(NoteKind::Cancellation));
                CancelledByManager
            }
            (_, ManagerReject) => {
                next.notes.push(note(NoteKind::Rejection));
                RejectedByManagerAwaitingModification
            }
            (_, ManagerApprove) => {
                next.notes.push(note(NoteKind::ApprovalCopy));
                BuyerDetailing
            }
            (_, BuyerDetail) => {
                next.detailed = true;
                BuyerDetailing
            }
            (_, CreateLtsa) => {
                next.notes.push(note(NoteKind::LtsaCopy));
                LtsaCreated
            }
            (_, SendToVendor) => SentToVendor,
        };
        Ok(next)
    }
}
