from gridinertia.scenario_info import ScenarioParameters, CampaignParameters


four_node_vsg = ScenarioParameters(scenario_id='four-node-vsg',  # Name used in output rows and files
                                   grid='four_node',  # Shipped grid name or grid JSON file
                                   vsg={'kind': 'keep'},  # Keep the VSG of the grid (node 2)
                                   alpha=5.,  # Inertia growth gain in pu
                                   beta=5.,  # Inertia decay rate in 1/s
                                   policy={'mode': 'rearm', 'band_hz': 1e-4, 'hold': 60.},  # Reset m once settled
                                   fault={'node': 'first_vsg', 'delta_P': -0.2},  # Power step at the VSG in pu
                                   t_end=120.,  # Horizon in s
                                   sample_dt=1e-3,  # Output sample spacing in s
                                   seed=1)

rts96_scenario = ScenarioParameters(scenario_id='rts96-area-vsgs',
                                    grid='rts96_like',
                                    vsg={'kind': 'per_area', 'count': 2},  # First two generators of every area
                                    alpha=10.,
                                    beta=10.,
                                    fault={'node': 'first_vsg', 'delta_P_mw': -100., 'base_mva': 100.},  # 100 MW loss
                                    t_end=120.,
                                    seed=1)

barbell_campaign = CampaignParameters(ScenarioParameters(scenario_id='barbell', grid='barbell', alpha=10., beta=10.,
                                                         t_end=120., seed=3),
                                      threshold_mw=40.,  # Fault every generator injecting at least 40 MW
                                      delta_p_mw=-100.,
                                      split_fraction=0.4)  # Share of nodes labelled central
# Placements to compare; both promote two generators so the inertia budgets agree
barbell_campaign.add_placement(name='peripheral', vsg={'kind': 'peripheral', 'count': 2})
barbell_campaign.add_placement(name='homogeneous', vsg={'kind': 'homogeneous', 'count': 2})
