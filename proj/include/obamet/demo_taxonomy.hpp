// Copyright 2026 The obamet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <string_view>

#include "obamet/taxonomy.hpp"

namespace obamet {

// Small WordNet-shaped hierarchy used by tests, the simulator defaults and
// the CLI ("builtin:demo"). The interest subtree loosely follows ad-network
// category systems; labels with '/' or shared names mimic the flat
// vocabularies of URL categorization services. The physical-entity chain
// sets the maximum depth to 19, so identical keywords score ln(38).
inline constexpr std::string_view kDemoTaxonomyTsv = R"(entity	-
abstraction	entity
physical entity	entity
interests	abstraction
attribute	abstraction
measure	abstraction
communication	abstraction
group	abstraction
time period	measure
language	communication
social group	group
home & garden	interests
home/garden	home & garden
swimming pools & spas	home & garden
hot tubs	swimming pools & spas
pool supplies	swimming pools & spas
yard & patio	home & garden
garden furniture	yard & patio
home improvement	home & garden
flooring	home improvement
home furnishings	home & garden
kitchen & dining	home & garden
sports	interests
water sports	sports
surf & swim	water sports
sports/recreation	water sports
sailing	water sports
motor sports	sports
formula racing	motor sports
rally racing	motor sports
team sports	sports
soccer	team sports
basketball	team sports
cycling	sports
bicycles & accessories	cycling
mountain bikes	bicycles & accessories
road bikes	bicycles & accessories
winter sports	sports
hobbies & leisure	interests
outdoor toys & play equipment	hobbies & leisure
recreation & hobbies	hobbies & leisure
recreation/hobbies	hobbies & leisure
crafts	hobbies & leisure
camping & outdoors	hobbies & leisure
business & industrial	interests
security products & services	business & industrial
home security	security products & services
security/surveillance	security products & services
advertising & marketing	business & industrial
shipping & logistics	business & industrial
shopping	interests
apparel & accessories	shopping
gems & jewellery	apparel & accessories
watches	apparel & accessories
mass merchants & department stores	shopping
coupons & discount offers	shopping
beauty & fitness	interests
fitness	beauty & fitness
gyms & health clubs	fitness
yoga & pilates	fitness
cosmetics	beauty & fitness
hair care	beauty & fitness
travel	interests
air travel	travel
low cost airlines	air travel
airport parking	air travel
hotels & accommodations	travel
car rental	travel
cruises	travel
finance	interests
banking	finance
online banking	banking
credit cards	banking
insurance	finance
investing	finance
stocks & bonds	investing
food & drink	interests
cooking & recipes	food & drink
baking	cooking & recipes
vegetarian cuisine	cooking & recipes
restaurants	food & drink
fast food	restaurants
beverages	food & drink
arts & entertainment	interests
movies	arts & entertainment
action films	movies
documentary films	movies
music & audio	arts & entertainment
tv & video	arts & entertainment
autos & vehicles	interests
cars	autos & vehicles
motorcycles	autos & vehicles
vehicle parts	autos & vehicles
real estate	interests
property for sale	real estate
rental listings	real estate
pets & animals	interests
pets	pets & animals
pet dogs	pets
pet cats	pets
pet food & supplies	pets & animals
games	interests
video games	games
console games	video games
pc games	video games
board games	games
news	interests
weather	news
local news	news
business news	news
internet & telecom	interests
mobile phones	internet & telecom
telecommunications	internet & telecom
web hosting	internet & telecom
computers & electronics	interests
consumer electronics	computers & electronics
software	computers & electronics
health	interests
health conditions	health
diabetes	health conditions
cancer	health conditions
mental health	health conditions
pharmacy	health
people & society	interests
religion & belief	people & society
christianity	religion & belief
islam	religion & belief
lgbt	people & society
law & government	interests
politics	law & government
legal services	law & government
jobs & education	interests
jobs	jobs & education
education	jobs & education
online courses	education
object	physical entity
substance	physical entity
water	substance
whole	object
artifact	whole
instrumentality	artifact
device	instrumentality
machine	device
computer	machine
container	instrumentality
vessel	container
structure	artifact
building	structure
house	building
living thing	whole
organism	living thing
plant	organism
vascular plant	plant
tree	vascular plant
oak	tree
person	organism
adult	person
worker	adult
animal	organism
chordate	animal
vertebrate	chordate
bird	vertebrate
fish	vertebrate
mammal	vertebrate
placental	mammal
ungulate	placental
horse	ungulate
primate	placental
carnivore	placental
feline	carnivore
house cat	feline
canine	carnivore
wolf	canine
dog	canine
toy dog	dog
working dog	dog
sled dog	working dog
shepherd dog	working dog
collie	shepherd dog
german shepherd	shepherd dog
police dog	german shepherd
k9 unit	police dog
)";

inline KeywordTaxonomy demo_taxonomy() { return KeywordTaxonomy::parse(kDemoTaxonomyTsv); }

}  // namespace obamet
