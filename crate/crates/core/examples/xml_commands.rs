//! Render commands to XML, read a legacy document back, and bind commands to
//! devices by capability.

use decision_engine::decision::StakeholderProfile;
use decision_engine::invariant::Interval;
use decision_engine::notification::{
    bind_devices, parse_command_list, parse_xml, render_xml, DeviceRegistry,
};

const COMMANDS: &str = "\
display profile=ptz_camera3_view
composite_image image=gridsubstation.jpg rect=350,600,120,150 text=\"130,90,red,Incident at Grid Substation\"
earth lat=-38.1771269 long=146.3428259 height=100m
map lat=-38.1771269 long=146.3428259 zoom=15z
";

const LEGACY: &str = r#"<output>
  <command device="vxportal6" type="event" catagory="highrisk" id="1001"></command>
  <command device="vxlab" type="view" image="gridsubstation.jpg"
        rectx="350" recty="600" rectw="120" recth="150" text="Grid Substation" txtx="130" txty="90"></command>
  <command device="vxportal4" type="earth" lat="-38.1771269" long="146.3428259" height="100m">
    <command device="amritlab" type="map" lat="-38.1771269" long="146.3428259" zoom="15z"></command>
  </command>
</output>"#;

fn main() {
    let bindings = parse_command_list(COMMANDS).unwrap();
    print!("{}", render_xml(&bindings));

    for b in parse_xml(LEGACY).unwrap() {
        println!("{:?} -> {:?}", b.device, b.command);
    }

    let registry = DeviceRegistry::parse(
        "device id=vxlab caps=banner,display,image,map,earth default=true\ndevice id=vxportal2 caps=banner,display\n",
    )
    .unwrap();
    let bob = StakeholderProfile::new(
        "bob",
        ["alarm"],
        vec![Interval::new(0, 10)],
        (0, 0),
        "vxportal2",
    )
    .unwrap();
    let commands: Vec<_> = bindings.into_iter().map(|b| b.command).collect();
    print!(
        "{}",
        render_xml(&bind_devices(&commands, &[bob], &registry))
    );
}
