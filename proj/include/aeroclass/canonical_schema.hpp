#pragma once

#include <string_view>

namespace aeroclass {

// Mirror of data/schema.json; a unit test keeps the two byte-identical.
inline constexpr std::string_view kCanonicalSchemaDocument = R"schema({
  "version": "occurrence-schema-1",
  "classes": [
    {
      "id": "phase_of_flight",
      "display_name": "Phase of flight",
      "features": [
        {
          "id": "pushback_phase",
          "display_name": "Pushback Phase"
        },
        {
          "id": "taxiing_or_towing_phase",
          "display_name": "Taxiing or Towing Phase"
        },
        {
          "id": "takeoff_or_toga",
          "display_name": "Take-off or Take-off Go-around (TOGA)"
        },
        {
          "id": "inflight_phase",
          "display_name": "Inflight Phase"
        },
        {
          "id": "landing_phase",
          "display_name": "Landing Phase"
        },
        {
          "id": "parking_or_parked_phase",
          "display_name": "Parking or Parked Phase"
        }
      ]
    },
    {
      "id": "pre_flight",
      "display_name": "Pre-flight related",
      "features": [
        {
          "id": "maintenance_during_groundhandling",
          "display_name": "Maintenance related during Groundhandling"
        },
        {
          "id": "other_groundhandling",
          "display_name": "Other Groundhandling (e.g. non-maintenance)"
        },
        {
          "id": "aircraft_load_or_planning",
          "display_name": "Issues with Aircraft Load or its Planning"
        }
      ]
    },
    {
      "id": "oem_mro",
      "display_name": "Original Equipment Manufacturer (OEM) or Maintenance, Repair and Overhaul (MRO)",
      "features": [
        {
          "id": "oem_mro_known_issues",
          "display_name": "OEM/MRO known issues"
        }
      ]
    },
    {
      "id": "aerodrome",
      "display_name": "Aerodrome related",
      "features": [
        {
          "id": "runway_special_operations",
          "display_name": "Runway under Special Operations"
        },
        {
          "id": "involving_taxiways",
          "display_name": "Involving taxiways"
        },
        {
          "id": "incursion",
          "display_name": "Incursion"
        },
        {
          "id": "excursion",
          "display_name": "Excursion"
        },
        {
          "id": "runway_overrun",
          "display_name": "Runway Overrun"
        },
        {
          "id": "aerodrome_related_matters",
          "display_name": "Aerodrome related matters"
        }
      ]
    },
    {
      "id": "weather",
      "display_name": "Weather related",
      "features": [
        {
          "id": "turbulence_by_weather",
          "display_name": "Turbulence by weather"
        },
        {
          "id": "weather",
          "display_name": "Weather"
        }
      ]
    },
    {
      "id": "atc",
      "display_name": "Air traffic control (ATC) related",
      "features": [
        {
          "id": "atc_resource_issues",
          "display_name": "ATC resource issues"
        },
        {
          "id": "atc_communications_issues",
          "display_name": "ATC communications issues"
        },
        {
          "id": "atc_actions",
          "display_name": "ATC actions"
        }
      ]
    },
    {
      "id": "separation",
      "display_name": "Separation related",
      "features": [
        {
          "id": "loss_of_separation",
          "display_name": "Loss of separation"
        },
        {
          "id": "tcas_resolution_advisory",
          "display_name": "Traffic alert and collision avoidance system (TCAS) Resolution Advisory"
        },
        {
          "id": "tcas_traffic_advisory",
          "display_name": "TCAS Traffic Advisory"
        },
        {
          "id": "egpws",
          "display_name": "Enhanced Ground Proximity Warning System"
        }
      ]
    },
    {
      "id": "flight_performance",
      "display_name": "Flight performance related",
      "features": [
        {
          "id": "takeoff_performance",
          "display_name": "Take-off Performance"
        },
        {
          "id": "flight_performance",
          "display_name": "Flight Performance"
        },
        {
          "id": "loss_of_control_inflight",
          "display_name": "Loss of control (of aircraft) during flight"
        },
        {
          "id": "minimum_safe_altitude_breached",
          "display_name": "Minimal Safe Altitude breached"
        },
        {
          "id": "landing_configuration_or_performance",
          "display_name": "Landing configuration or performance issues"
        }
      ]
    },
    {
      "id": "flight_crew",
      "display_name": "Flight crew related",
      "features": [
        {
          "id": "flight_crew_resource_issues",
          "display_name": "Flight crew resource issues"
        },
        {
          "id": "flight_crew_communications_issues",
          "display_name": "Flight crew communications issues"
        },
        {
          "id": "flight_crew_actions",
          "display_name": "Flight crew actions"
        }
      ]
    },
    {
      "id": "input_error",
      "display_name": "Input error or Omission",
      "features": [
        {
          "id": "incorrect_input",
          "display_name": "Incorrect input was made by any party"
        }
      ]
    },
    {
      "id": "aircraft_damage",
      "display_name": "Aircraft damage assessment",
      "features": [
        {
          "id": "damage_replaceable",
          "display_name": "Aircraft Damage Replaceable"
        },
        {
          "id": "damage_minor_repair",
          "display_name": "Aircraft Damage Minor Repair"
        },
        {
          "id": "tailstrike",
          "display_name": "TailStrike"
        },
        {
          "id": "foreign_object_damage",
          "display_name": "Foreign object damage (FOD)"
        },
        {
          "id": "birdstrike",
          "display_name": "Birdstrike"
        },
        {
          "id": "collision",
          "display_name": "Collision"
        },
        {
          "id": "near_collision",
          "display_name": "Near collision"
        }
      ]
    },
    {
      "id": "aircraft_system",
      "display_name": "Aircraft system related",
      "features": [
        {
          "id": "landing_gears",
          "display_name": "Landing Gears"
        },
        {
          "id": "hydraulic_system",
          "display_name": "Hydraulic System"
        },
        {
          "id": "fuel_system",
          "display_name": "Fuel System"
        },
        {
          "id": "electrical_system",
          "display_name": "Electrical System"
        },
        {
          "id": "flight_control_system",
          "display_name": "Flight Control System"
        },
        {
          "id": "electronics_or_avionics",
          "display_name": "Electronic or Avionics related"
        }
      ]
    },
    {
      "id": "engine",
      "display_name": "Engine issues",
      "features": [
        {
          "id": "engine_failure_or_unusable",
          "display_name": "Engine failure or not usable"
        },
        {
          "id": "other_engine_issues",
          "display_name": "Other engine Issues"
        },
        {
          "id": "engine_damage",
          "display_name": "Engine damage"
        }
      ]
    },
    {
      "id": "parts_liberated",
      "display_name": "Parts liberated from aircraft/engine",
      "features": [
        {
          "id": "part_came_off",
          "display_name": "Any part came off the aircraft or engine"
        }
      ]
    },
    {
      "id": "fire_smoke_odour",
      "display_name": "Fire/Smoke/Odour related",
      "features": [
        {
          "id": "smoke_fumes_odour",
          "display_name": "Smoke Fumes Odour related"
        },
        {
          "id": "fire_indication_alerts",
          "display_name": "Fire Indication Alerts"
        },
        {
          "id": "fire_fuel_system",
          "display_name": "Fuel System"
        },
        {
          "id": "fire_indication_persists",
          "display_name": "Fire indication persist despite actions"
        },
        {
          "id": "engine_fire",
          "display_name": "Engine fire"
        },
        {
          "id": "other_fire",
          "display_name": "Other types of fire"
        }
      ]
    },
    {
      "id": "pressurisation",
      "display_name": "Pressurisation related issues",
      "features": [
        {
          "id": "pressurisation_issue",
          "display_name": "Pressurisation issue"
        },
        {
          "id": "emergency_oxygen_use",
          "display_name": "Emergency oxygen use"
        }
      ]
    },
    {
      "id": "incapacitation_injuries",
      "display_name": "Incapacitation/Injuries",
      "features": [
        {
          "id": "incapacitation",
          "display_name": "Incapacitation"
        },
        {
          "id": "injuries",
          "display_name": "Injuries"
        }
      ]
    }
  ]
}
)schema";

} // namespace aeroclass
