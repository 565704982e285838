//! Numerical checks of the estimates and structural identities of warp
//! forcing, each reported as a [`BoundReport`].

pub mod bounds;
pub mod campaign;
pub mod instances;
pub mod report;
pub mod remark;
pub mod structural;
pub mod theorem;

pub use bounds::{
    check_lemma_1_1, check_lemma_2_1, check_lemma_2_2, check_lemma_2_3, check_lemma_3_1,
    check_lemma_3_2, half_line_grid, HALF_LINE_HORIZON, WARP_RATIO_CONSTANT,
};
pub use report::{campaign_failed, write_summary_csv, BoundReport, Sides, MARGINAL_FACTOR};
pub use structural::{
    check_bump, check_factorization, check_fixed_point, check_plateau, max_entry_difference,
    FACTORIZATION_TOLERANCE, FIXED_POINT_TOLERANCE,
};
pub use theorem::{
    centers_per_case_zone, check_main_theorem, proof_case, run_theorem_config, write_center_csv,
    write_sweep_csv, CenterResult, CenterSet, ConstantChain, TheoremConfig, TheoremInstance,
    DECAY_GUARD,
};
pub use campaign::{run_campaign, CampaignConfig, CheckName, CheckSpec, DEFAULT_INSTANCES, DEFAULT_SEED};
pub use remark::{default_radii, remark_reports, remark_table, write_remark_csv, RemarkRow};
