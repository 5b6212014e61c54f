pub mod boseck;
pub mod cli;
pub mod decomp;
pub mod exactmath;
pub mod oracle;
pub mod ramdata;
pub mod weier;
