#!/usr/bin/env python3
"""Builds appendix.json: appendix instruction records as canonical samples
plus the expected prompt and target bytes.

Expected bytes are produced here with Python's json module (compact
separators, non-ASCII kept), independently of the C++ serializer.
"""
import json
import os


def compact(value):
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def ent(name, kind, **constraints):
    e = {"name": name, "kind": kind}
    desc = constraints.pop("description", None)
    rule = constraints.pop("rule", None)
    if desc is not None:
        e["description"] = desc
    if constraints:
        e["constraints"] = constraints
    if rule is not None:
        e["rule"] = rule
    return e


def sample(id_, task, text, schema, gold, source):
    return {"id": id_, "task": task, "text": text, "schema": schema, "gold": gold,
            "source": source, "language": "en"}


goldens = []


def add(name, table, smp, template, fmt, prompt, target, style="B", compound=None):
    g = {"name": name, "table": table, "sample": smp, "template": template, "format": fmt,
         "style": style, "prompt": prompt, "target": target}
    if compound is not None:
        g["compound"] = compound
    goldens.append(g)


# NER, MIT Movie
ner_labels = ["average ratings", "year", "title", "actor", "character", "song"]
ner_text = "please show me a documentary featuring jessica lange from the 2010 s"
ner_instr = ("You are an expert in named entity recognition. Please extract entities that match the schema "
             "definition from the input. Return an empty list if the entity type does not exist. Please respond "
             "in the format of a JSON string.")
add("ner_mit_movie", "Tab.NER",
    sample("mit-movie:1", "NER", ner_text, [ent(l, "entity_type") for l in ner_labels],
           {"entities": [{"label": "year", "span": "2010 s"}, {"label": "actor", "span": "jessica lange"}]},
           "MIT Movie"),
    0, "JSON",
    compact({"instruction": ner_instr, "schema": ner_labels, "input": ner_text}),
    compact({"average ratings": [], "year": ["2010 s"], "title": [], "actor": ["jessica lange"],
             "character": [], "song": []}))

# RE
re_labels = ["country of capital", "children", "country of administrative divisions", "ethnicity"]
re_text = ("At a meeting in Montevideo , Uruguay , the four members of the trade bloc -- Brazil , Argentina , "
           "Paraguay and Uruguay -- are expected to formally begin negotiations to bring Venezuela into Mercosur , "
           "a group that seeks to standardize tariffs and trade practices throughout the region .")
re_instr = ("Please extract the elements that match the schema definition from the input and return the results "
            "in the format specified in the output_format.")
add("re_output_format", "Tab.RE",
    sample("re:1", "RE", re_text, [ent(l, "relation") for l in re_labels],
           {"relations": [{"predicate": "country of capital", "subject": "Uruguay", "object": "Montevideo"}]},
           "RE"),
    0, "JSON",
    compact({"instruction": re_instr, "schema": re_labels,
             "output_format": {"predicate": [{"subject": "", "object": ""}]}, "input": re_text}),
    compact({"country of capital": [{"subject": "Uruguay", "object": "Montevideo"}], "children": [],
             "country of administrative divisions": [], "ethnicity": []}))

# SPO
spo_text = ("The characteristics of schistosomiasis include symptoms of the hepatobiliary system (such as abdominal "
            "pain, jaundice, right upper abdominal pain), pulmonary symptoms (such as chronic cough, chest pain, "
            "dyspnea and hemoptysis) or digestive symptoms (such as mucosal ulcers, malnutrition).")
spo_instr = ("You are an expert specializing in the extraction of SPO triplets. Please extract triplets from the "
             "input that conform to the defined schema. Return an empty list for relationships that do not exist. "
             "Please respond in the format of a JSON string. You can refer to the example for extraction.")
spo_pred = "related (caused by)"
spo_objects = ["jaundice", "mucosal ulcers", "malnutrition"]
add("spo_schistosomiasis", "Tab.SPO",
    sample("spo:1", "SPO", spo_text,
           [ent(spo_pred, "spo_pattern", subject_type="disease", object_type="disease")],
           {"triples": [{"predicate": spo_pred, "subject": "schistosomiasis", "subject_type": "disease",
                         "object": o, "object_type": "disease"} for o in spo_objects]},
           "SPO"),
    0, "JSON",
    compact({"instruction": spo_instr,
             "schema": [{"subject_type": "disease", "predicate": spo_pred, "object_type": "disease"}],
             "input": spo_text}),
    compact({spo_pred: [{"subject": "schistosomiasis", "object": o} for o in spo_objects]}))

# EE
ee_breach = ["number of victim", "number of data", "purpose", "attacker", "compromised data", "victim", "place",
             "time", "attack pattern", "tool", "damage amount"]
ee_ransom = ["damage amount", "place", "victim", "payment method", "attack pattern", "attacker", "time"]
ee_text = ("Leading French presidential candidate Emmanuel Macron's campaign said on Friday it had been the target "
           "of a `` massive'' computer hack that dumped its campaign emails online 1-1/2 days before voters choose "
           "between the centrist and his far - right rival , Marine Le Pen .")
ee_instr = ("You are an expert in event extraction. Please extract events from the input that conform to the schema "
            "definition. Return an empty list for events that do not exist, and return NAN for arguments that do "
            "not exist. If an argument has multiple values, please return a list. Respond in the format of a JSON "
            "string.")
ee_args = {r: "NAN" for r in ee_breach}
ee_args["victim"] = "computer"
ee_args["time"] = "Friday"
add("ee_data_breach", "Tab.EE",
    sample("ee:1", "EE", ee_text,
           [ent("data breach", "event_type", roles=ee_breach, trigger=True),
            ent("ransom", "event_type", roles=ee_ransom, trigger=True)],
           {"events": [{"event_type": "data breach", "trigger": "hack",
                        "arguments": {"victim": "computer", "time": "Friday"}}]},
           "CASIE"),
    0, "JSON",
    compact({"instruction": ee_instr,
             "schema": [{"event_type": "data breach", "trigger": True, "arguments": ee_breach},
                        {"event_type": "ransom", "trigger": True, "arguments": ee_ransom}],
             "input": ee_text}),
    compact({"data breach": [{"trigger": "hack", "arguments": ee_args}], "ransom": []}))

# EET
eet_schema = {
    "nominate": "'Nominate' selects candidates for job or honor; trigger words include 'nominations', 'named', 'selecting', 'nomination'.",
    "attack": "An 'attack' event is an attempt to harm indicated by trigger words in a text, even if not yet carried out.",
    "phone write": "Event emphasizing communication through phone calls, emails, messages. Can be formal or informal. Trigger words: 'Call', 'email', 'message'.",
    "transport": "Moving or transporting something or someone from one place to another. Includes relocating, deploying resources, and lifting off.",
    "label81": "'Convict' means being declared guilty of a crime, leading to penalties. It can happen formally or informally. Trigger words include 'found', 'pled guilty', 'convicted'.",
}
eet_text = ("a member of the international committee of red cross visited the local hospital there , and he says "
            "it ' s a horrible scene .")
eet_instr = ("You are an expert in event extraction. Please extract event types and event trigger words from the "
             "input that conform to the schema definition. Return an empty list for non-existent events. Please "
             "respond in the format of a JSON string.")
add("eet_ace", "Tab.EET",
    sample("eet:1", "EET", eet_text,
           [ent(k, "event_type", description=v, trigger=True) for k, v in eet_schema.items()],
           {"events": [{"event_type": "transport", "trigger": "visited", "arguments": {}}]},
           "ACE2005"),
    0, "JSON",
    compact({"instruction": eet_instr, "schema": eet_schema, "input": eet_text}),
    compact({"nominate": [], "attack": [], "phone write": [], "transport": ["visited"], "label81": []}))

# EEA
eea_roles = ["Treatment.Dosage", "Subject.Age", "Treatment.Drug", "Treatment.Disorder", "Treatment.Route",
             "Treatment.Time_elapsed", "Subject.Gender", "Treatment.Freq", "Effect", "Treatment", "Subject.Race",
             "Combination.Drug", "Subject.Population", "Subject", "Subject.Disorder"]
eea_text = ("CONCLUSION: Fixed drug eruption is associated with many drugs but this is the first such report with "
            "omeprazole.")
eea_instr = ("You are an expert in event argument extraction. Please extract event arguments and their roles from "
             "the input that conform to the schema definition, which already includes event trigger words. If an "
             "argument does not exist, return NAN or an empty dictionary. Please respond in the format of a JSON "
             "string.")
eea_out = {r: "NAN" for r in eea_roles}
eea_out["Treatment.Drug"] = "omeprazole"
eea_out["Effect"] = "Fixed drug eruption"
eea_out["Treatment"] = "omeprazole"
add("eea_phee", "Tab.EEA",
    sample("eea:1", "EEA", eea_text, [ent("adverse event", "event_type", roles=eea_roles)],
           {"events": [{"event_type": "adverse event",
                        "arguments": {"Treatment.Drug": "omeprazole", "Effect": "Fixed drug eruption",
                                      "Treatment": "omeprazole"}}]},
           "PHEE"),
    0, "JSON",
    compact({"instruction": eea_instr,
             "schema": [{"event_type": "adverse event", "arguments": eea_roles}], "input": eea_text}),
    compact({"adverse event": [eea_out]}))

# OpenIE
oie_text = ("Defoe 's A Review , published on 3 December 1709 and demanding `` a Law in the present Parliament ... "
            "for the Encouragement of Learning , Arts , and Industry , by securing the Property of Books to the "
            "Authors or Editors of them '' , was followed by How 's Some Thoughts on the Present State of Printing "
            "and Bookselling , which hoped that Parliament `` might think fit to secure Property in Books by a Law "
            "'' .")
oie_instr = ("You are an expert in open information extraction. Below is a text. Please extract the elements of "
             "subject, predicate, object, time, and location from the text. Return them in the format: "
             "{\"subject\":[subject], \"predicate\":[predicate], \"object\":[object], \"time\":[time], "
             "\"location\":[location]}, arranged in the order they appear in the text. Do not output elements that "
             "do not exist.")
oie_tuples = [
    ("Defoe", "'s", "A Review , published on 3 December 1709 and demanding `` a Law in the present Parliament ... "
                    "for the Encouragement of Learning , Arts , and Industry"),
    ("A Review", "published", "on 3 December 1709"),
    ("Some Thoughts on the Present State of Printing and Bookselling", "hoped",
     "that Parliament `` might think fit to secure Property in Books by a Law"),
    ("Parliament", "might think", "fit to secure Property in Books by a Law"),
]
oie_target = "\n".join('("%s":[subject], "%s":[predicate], "%s":[object])' % t for t in oie_tuples)
add("openie_defoe", "Tab.OpenIE",
    sample("openie:1", "OPENIE", oie_text,
           [ent("open tuple", "attribute_set", roles=["subject", "predicate", "object", "time", "location"])],
           {"tuples": [[{"role": "subject", "text": s}, {"role": "predicate", "text": p},
                        {"role": "object", "text": o}] for s, p, o in oie_tuples]},
           "OpenIE"),
    0, "TUPLE_TEXT",
    oie_instr + "\nInput:" + oie_text,
    oie_target)

# TC
tc_labels = ["Constellation", "entertainment", "technology", "society", "stocks", "real estate", "education",
             "lottery", "home decoration", "games", "current affairs", "fashion", "sports"]
tc_text = ("Bright single: Member 48 yuan wins the first prize in the double color ball, the first cold is fully "
           "covered (picture)\n Beijing time, May 3, 2010, the 10044th issue of the double color ball lottery was "
           "announced. The lottery result was relatively positive. The first prize had 1033 winners, each winning "
           "13278 yuan, the second prize had 329 yuan, and the first prize for selecting any nine games was 157 "
           "yuan. \n\n")
tc_instr = ("Please classify the topic of the text in input and choose the type within the scope defined in the "
            "schema.")
add("tc_thucnews", "Tab.TC",
    sample("tc:1", "TC", tc_text, [ent(l, "class_label") for l in tc_labels], {"class_label": "lottery"},
           "THUCNews"),
    0, "JSON",
    compact({"instruction": tc_instr, "schema": [", ".join(tc_labels)], "input": tc_text}),
    compact({"type": "lottery"}))

# MRC
mrc_text = "2. Megatron: The cold leader of the Decepticons, the main antagonist in 'Transformers'."
mrc_q = "What is the name of the antagonist in 'Transformers'?"
mrc_instr = ("Please answer the question in question based on the content in input. If there is no answer in "
             "input, return: Not mentioned.")
add("mrc_transformers", "Tab.MRC",
    sample("mrc:1", "MRC", mrc_text, [ent("answer", "mrc_question", question=mrc_q)], {"answer": "Megatron"},
           "MRC"),
    0, "JSON",
    compact({"instruction": mrc_instr, "input": mrc_text, "question": mrc_q}),
    compact({"answer": "Megatron"}))

# KGE
kge_attrs = ["achievement", "director", "performer", "lyrics by", "composer", "platform", "screenwriter", "author",
             "developer", "based on", "country of origin", "tracklist", "publisher", "production company",
             "box office", "original broadcaster", "cast member"]
kge_text = ("The Lego Batman Movie  is the soundtrack to the 2017 computer-animated film The Lego Batman Movie, "
            "which is the second instalment in The Lego Movie franchise. The film is based on the DC Comics superhero "
            "Batman, and other primary characters from the DC Universe and the Lego DC Super Heroes' Batman toy "
            "line. This is the first and only film in the franchise not to be scored by Mark Mothersbaugh, instead "
            "Lorne Balfe scored for the film.  The soundtrack to the film was released by WaterTower Music, through "
            "two-disc CD formats and for digital download, on February 3, 2017, a week prior to the film's release. "
            "A vinyl edition of the soundtrack was released on May 19, 2017.")
kge_instr = ("You are an expert in structured knowledge systems for graph entities. Based on the schema description "
             "of the input entity type, you extract the corresponding entity instances and their attribute "
             "information from the text. Attributes that do not exist should not be output. If an attribute has "
             "multiple values, a list should be returned. The results should be output in a parsable JSON format.")
add("kge_lego_batman", "Tab.KGE",
    sample("kge:1", "KGE", kge_text, [ent("Works", "attribute_set", roles=kge_attrs)],
           {"kg": [{"type": "Works", "entities": [{"name": "The Lego Batman Movie",
                                                   "attributes": {"composer": "Lorne Balfe"}}]}]},
           "KGE"),
    0, "JSON",
    compact({"instruction": kge_instr, "schema": [{"entity_type": "Works", "attributes": kge_attrs}],
             "input": kge_text}),
    compact({"Works": {"The Lego Batman Movie": {"composer": "Lorne Balfe"}}}))

# Format variants: the table omits the input, so a one-sentence input naming both
# arguments stands in.
fmt_text = "Sirhan Sirhan shot and killed Robert F. Kennedy in Los Angeles in June 1968."
fmt_sample = sample("format:1", "RE", fmt_text, [ent("kill", "relation")],
                    {"relations": [{"predicate": "kill", "subject": "Sirhan Sirhan",
                                    "object": "Robert F. Kennedy"}]},
                    "NYT")
add("format_json", "Tab.format", fmt_sample, 0, "JSON",
    compact({"instruction": re_instr, "schema": ["kill"],
             "output_format": {"predicate": [{"subject": "", "object": ""}]}, "input": fmt_text}),
    compact({"kill": [{"subject": "Sirhan Sirhan", "object": "Robert F. Kennedy"}]}))
add("format_markdown", "Tab.format", fmt_sample, 0, "MARKDOWN_TABLE",
    compact({"instruction": "Please extract the elements that match the schema definition from the input and "
                            "return the results in the format of markdown Table.The header is | subject | "
                            "predicate | object |",
             "schema": ["kill"], "input": fmt_text}),
    "| subject |predicate | object |\n| --- | --- |--- |\n| Sirhan Sirhan| kill | Robert F. Kennedy |",
    style="C", compound={})

# CrossNER, basic and compound
cn_text = ("Together with Yann LeCun, and Yoshua Bengio, Hinton won the 2018 Turing Award for conceptual and "
           "engineering breakthroughs that have made deep neural networks a critical component of computing.")
cn_desc = ("The 'else' type includes a wide range of entities not in specific categories like objects, events, "
           "awards, or concepts. They can be names of people, movies, papers, organizations, or algorithms. This "
           "type includes anything important in a text not in other categories.")
cn_examples = [
    ("More recently , fictional representations of artificially intelligent robots in films such as A.I. "
     "Artificial Intelligence and Ex Machina and the 2016 TV adaptation of Westworld have engaged audience sympathy "
     "for the robots themselves .", ["A.I. Artificial Intelligence", "Ex Machina", "Westworld"]),
    ("In 1999 , Felix Gers and his advisor Jurgen Schmidhuber and Fred Cummins introduced the forget gate ( also "
     "called keep gate ) into LSTM architecture ,", []),
    ("Octave helps in solving linear and nonlinear problems numerically , and for performing other numerical "
     "experiments using a that is mostly compatible with MATLAB .", []),
    ("Eurisko made many interesting discoveries and enjoyed significant acclaim , with his paper Heuretics : "
     "Theoretical and Study of Heuristic Rules winning the Best Paper award at the 1982 Association for the "
     "Advancement of Artificial Intelligence .", ["Heuretics : Theoretical and Study of Heuristic Rules",
                                                 "Best Paper award"]),
]
cn_sample = sample("crossner:1", "NER", cn_text, [ent("else", "entity_type")],
                   {"entities": [{"label": "else", "span": "Turing Award"}]}, "CrossNER_AI")
add("crossner_basic", "Tab.CrossNER", cn_sample, 0, "JSON",
    compact({"instruction": ner_instr, "schema": ["else"], "input": cn_text}),
    compact({"else": ["Turing Award"]}))
add("crossner_compound", "Tab.CrossNER", cn_sample, 0, "JSON",
    compact({"instruction": ner_instr + "You can refer to the example for extraction.",
             "schema": [{"entity_type": "else", "description": cn_desc}],
             "example": [{"input": i, "output": {"else": spans}} for i, spans in cn_examples],
             "input": cn_text}),
    compact({"else": ["Turing Award"]}),
    style="C",
    compound={"descriptions": {"else": cn_desc},
              "examples": [{"source_id": "crossner:ex%d" % n, "input": i,
                            "schema": [ent("else", "entity_type")],
                            "output": {"entities": [{"label": "else", "span": s} for s in spans]}}
                           for n, (i, spans) in enumerate(cn_examples)]})

# FewRel, basic and compound (basic input taken from the compound block)
fr_text = ("Vincent Madeley Harris ( October 14 , 1913 - March 31 , 1988 ) was an American clergyman of the "
           "Catholic Church ( Roman Rite ) .")
fr_instr = ("You are an expert in relationship extraction. Please extract relationship triples that match the "
            "schema definition from the input. Return an empty list for relationships that do not exist. Please "
            "respond in the format of a JSON string.")
fr_desc = ("This type of relation is about the connection between a subject and their religious belief or faith. "
           "The subject can be a person, organization, historical period, or group.")
fr_examples = [
    ("Leonard fought Wilfred Benitez for the WBC Welterweight Championship on November 30 , 1979 , at Caesar 's "
     "Palace in Las Vegas , Nevada .", []),
    ("St Patrick 's Island is so called because this is where the Irish patron saint is reputed to have landed and "
     "begun his mission to convert the country to Christianity .", [("patron saint", "Christianity")]),
]
fr_sample = sample("fewrel:1", "RE", fr_text, [ent("religion", "relation")],
                   {"relations": [{"predicate": "religion", "subject": "Vincent Madeley Harris",
                                   "object": "Catholic Church"}]}, "FewRel")
fr_target = compact({"religion": [{"subject": "Vincent Madeley Harris", "object": "Catholic Church"}]})
add("fewrel_basic", "Tab.FewRel", fr_sample, 1, "JSON",
    compact({"instruction": fr_instr, "schema": ["religion"], "input": fr_text}), fr_target)
add("fewrel_compound", "Tab.FewRel", fr_sample, 1, "JSON",
    compact({"instruction": fr_instr + "You can refer to the example for extraction.",
             "schema": [{"relation": "religion", "description": fr_desc}],
             "example": [{"input": i, "output": {"religion": [{"subject": s, "object": o} for s, o in pairs]}}
                         for i, pairs in fr_examples],
             "input": fr_text}),
    fr_target, style="C",
    compound={"descriptions": {"religion": fr_desc},
              "examples": [{"source_id": "fewrel:ex%d" % n, "input": i, "schema": [ent("religion", "relation")],
                            "output": {"relations": [{"predicate": "religion", "subject": s, "object": o}
                                                     for s, o in pairs]}}
                           for n, (i, pairs) in enumerate(fr_examples)]})

# Preference rule pair
rule_text = ("Average household income for the sample was $ 194,000 , and average net assets were reported as "
             "$ 775,000 .")
rule_desc = "Represents monetary values, such as income, prices, or asset amounts."
for name, rule, spans in [
    ("rule_money_strip",
     "Extract all monetary values mentioned in the text, If there are units ot symbols before or after the "
     "numerical value, please ignore them.", ["194,000", "775,000"]),
    ("rule_money_include",
     "Extract all monetary values mentioned in the text, If there are units ot symbols before or after the "
     "numerical value, please also extract them together.", ["$ 194,000", "$ 775,000"]),
]:
    smp = sample("rule:" + name, "NER", rule_text,
                 [ent("money", "entity_type", description=rule_desc, rule=rule)],
                 {"entities": [{"label": "money", "span": s} for s in spans]}, "rule")
    add(name, "Tab.Rule", smp, 0, "JSON",
        compact({"instruction": ner_instr,
                 "schema": [{"entity_type": "money", "description": rule_desc, "rule": rule}],
                 "input": rule_text}),
        compact({"money": spans}), style="C", compound={"descriptions": {"money": rule_desc}})
    goldens[-1]["label"] = compact([{"entity_type": "money", "entity": s} for s in spans])

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "appendix.json"), "w", encoding="utf-8") as f:
    json.dump({"goldens": goldens}, f, ensure_ascii=False, indent=1)
    f.write("\n")
print(len(goldens), "goldens")
